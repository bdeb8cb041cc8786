#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "gri/grid.hpp"
#include "gri/solver.hpp"

namespace gri {

/// One axis-aligned patch: voxel index set plus normalized splice weights.
struct Patch {
  std::array<int, 3> start{0, 0, 0};
  std::array<int, 3> dims{1, 1, 1};
  std::vector<long> indices;     // global voxel ids, x-fastest
  std::vector<double> weights;   // per-voxel splice weight, sums to 1 across
                                 // the patches covering a voxel
  long size() const { return static_cast<long>(indices.size()); }
};

struct PatchPartition {
  std::array<int, 3> grid_divisions{1, 1, 1};
  std::array<int, 3> patch_dims{1, 1, 1};
  double overlap = 0.5;
  std::vector<Patch> patches;

  int patch_count() const { return static_cast<int>(patches.size()); }
};

/// Overlapping axis-aligned patches with stride ceil(dim * (1 - overlap));
/// the final patch per axis is clamped to the boundary.  Splice weights are
/// a separable linear taper over the overlap margins, normalized per voxel.
PatchPartition partition_grid(const ImagingGrid& grid,
                              const std::array<int, 3>& patch_dims,
                              double overlap = 0.5);

/// Patch dims chosen so that roughly `counts` patches tile each axis at the
/// given overlap (counts of 1 give the full axis).
PatchPartition partition_grid_by_counts(const ImagingGrid& grid,
                                        const std::array<int, 3>& counts,
                                        double overlap = 0.5);

/// Back-projection stack: column k = A_(k)^* y_(k).
CMat back_project(std::span<const GroupSystem> systems);

/// PSF block for one group and patch: P = (A R_b^T)^* (A R_b^T), assembled
/// from the patch columns of A; exactly self-adjoint.
CMat psf_block(const CMat& a, std::span<const long> patch_indices);

/// Per-patch solves of the image-domain systems (P_(k,b), R_b z_(k)) with the
/// first-order algorithm; independent across patches.  cfg.gamma must be set.
struct PatchSolveResult {
  std::vector<CMat> solutions;  // per patch, N_B x K
  std::vector<ConvergenceHistory> histories;
  std::vector<double> solve_seconds;
};
PatchSolveResult solve_patches(
    const CMat& z, const PatchPartition& partition,
    const std::vector<std::vector<CMat>>& psf_blocks, const SolverConfig& cfg,
    int threads = 1);

/// Weighted reassembly: X(n, k) = sum_b weight_b(n) X_b(local(n), k).
CMat splice(const std::vector<CMat>& patch_solutions,
            const PatchPartition& partition);

struct TimingEntry {
  std::string phase;
  long patch_index = -1;  // -1 for global phases
  double seconds = 0.0;
  long iterations = 0;
};

struct TimingReport {
  std::vector<TimingEntry> entries;
  /// CSV with columns: phase, patch, seconds, iterations.
  std::string to_csv() const;
};

struct FastReconstructResult {
  CMat x;  // N x K
  TimingReport timing;
  std::vector<ConvergenceHistory> patch_histories;
  double gamma_used = 0.0;
};

/// Algorithm: back-project, partition, assemble PSF blocks, solve patches in
/// parallel, splice.  An unset cfg.gamma is resolved once, globally, from the
/// image-domain back-projection stack.
FastReconstructResult fast_reconstruct(std::span<const GroupSystem> systems,
                                       const ImagingGrid& grid,
                                       const std::array<int, 3>& patch_dims,
                                       double overlap, const SolverConfig& cfg,
                                       int threads = 1);

}  // namespace gri
