#include "gri/patchwise.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

#include "gri/em.hpp"
#include "parallel.hpp"

namespace gri {

namespace {

std::vector<int> axis_starts(int n, int dim, double overlap) {
  const int stride =
      std::max(1, static_cast<int>(std::ceil(dim * (1.0 - overlap))));
  std::vector<int> starts;
  for (int s = 0;; s += stride) {
    if (s + dim >= n) {
      const int last = n - dim;
      if (starts.empty() || starts.back() != last) starts.push_back(last);
      break;
    }
    starts.push_back(s);
  }
  return starts;
}

// Taper profile along one axis: linear ramp over the overlap margin on sides
// that have a neighboring patch, flat elsewhere.  Strictly positive.
double axis_weight(int local, int dim, int margin, bool left, bool right) {
  double w = 1.0;
  if (left && local < margin)
    w *= static_cast<double>(local + 1) / (margin + 1);
  if (right && local >= dim - margin)
    w *= static_cast<double>(dim - local) / (margin + 1);
  return w;
}

double now_seconds() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

}  // namespace

PatchPartition partition_grid(const ImagingGrid& grid,
                              const std::array<int, 3>& patch_dims,
                              double overlap) {
  const auto& div = grid.divisions();
  for (int a = 0; a < 3; ++a)
    if (patch_dims[a] < 1 || patch_dims[a] > div[a])
      throw std::invalid_argument(
          "partition_grid: patch dims must be within [1, grid divisions]");
  if (!(overlap >= 0.0 && overlap < 1.0))
    throw std::invalid_argument("partition_grid: overlap must be in [0, 1)");

  PatchPartition part;
  part.grid_divisions = div;
  part.patch_dims = patch_dims;
  part.overlap = overlap;

  std::array<std::vector<int>, 3> starts;
  std::array<int, 3> margins{};
  for (int a = 0; a < 3; ++a) {
    starts[a] = axis_starts(div[a], patch_dims[a], overlap);
    const int stride =
        std::max(1, static_cast<int>(std::ceil(patch_dims[a] * (1.0 - overlap))));
    margins[a] = std::max(0, patch_dims[a] - stride);
  }

  for (int sz : starts[2])
    for (int sy : starts[1])
      for (int sx : starts[0]) {
        Patch p;
        p.start = {sx, sy, sz};
        p.dims = patch_dims;
        p.indices.reserve(static_cast<long>(patch_dims[0]) * patch_dims[1] *
                          patch_dims[2]);
        p.weights.reserve(p.indices.capacity());
        const std::array<bool, 3> has_left{sx > 0, sy > 0, sz > 0};
        const std::array<bool, 3> has_right{sx + patch_dims[0] < div[0],
                                            sy + patch_dims[1] < div[1],
                                            sz + patch_dims[2] < div[2]};
        for (int iz = 0; iz < patch_dims[2]; ++iz)
          for (int iy = 0; iy < patch_dims[1]; ++iy)
            for (int ix = 0; ix < patch_dims[0]; ++ix) {
              p.indices.push_back(grid.index_of(sx + ix, sy + iy, sz + iz));
              p.weights.push_back(
                  axis_weight(ix, patch_dims[0], margins[0], has_left[0],
                              has_right[0]) *
                  axis_weight(iy, patch_dims[1], margins[1], has_left[1],
                              has_right[1]) *
                  axis_weight(iz, patch_dims[2], margins[2], has_left[2],
                              has_right[2]));
            }
        part.patches.push_back(std::move(p));
      }

  // Normalize to a partition of unity.
  std::vector<double> sums(grid.voxel_count(), 0.0);
  for (const Patch& p : part.patches)
    for (long i = 0; i < p.size(); ++i) sums[p.indices[i]] += p.weights[i];
  for (Patch& p : part.patches)
    for (long i = 0; i < p.size(); ++i) p.weights[i] /= sums[p.indices[i]];

  return part;
}

PatchPartition partition_grid_by_counts(const ImagingGrid& grid,
                                        const std::array<int, 3>& counts,
                                        double overlap) {
  const auto& div = grid.divisions();
  std::array<int, 3> dims{};
  for (int a = 0; a < 3; ++a) {
    if (counts[a] < 1 || counts[a] > div[a])
      throw std::invalid_argument(
          "partition_grid_by_counts: counts must be within [1, divisions]");
    if (counts[a] == 1) {
      dims[a] = div[a];
    } else {
      const double denom = counts[a] - (counts[a] - 1) * overlap;
      dims[a] = std::clamp(static_cast<int>(std::ceil(div[a] / denom)), 1,
                           div[a]);
    }
  }
  return partition_grid(grid, dims, overlap);
}

CMat back_project(std::span<const GroupSystem> systems) {
  if (systems.empty())
    throw std::invalid_argument("back_project: no groups");
  CMat z(systems[0].a.cols(), static_cast<long>(systems.size()));
  for (std::size_t k = 0; k < systems.size(); ++k)
    z.col(k) = apply_adjoint(systems[k].a, systems[k].y);
  return z;
}

CMat psf_block(const CMat& a, std::span<const long> patch_indices) {
  const long nb = static_cast<long>(patch_indices.size());
  CMat sub(a.rows(), nb);
  for (long j = 0; j < nb; ++j) {
    if (patch_indices[j] < 0 || patch_indices[j] >= a.cols())
      throw std::invalid_argument("psf_block: voxel index out of range");
    sub.col(j) = a.col(patch_indices[j]);
  }
  CMat p = CMat::Zero(nb, nb);
  p.selfadjointView<Eigen::Lower>().rankUpdate(sub.adjoint());
  return p.selfadjointView<Eigen::Lower>();
}

PatchSolveResult solve_patches(
    const CMat& z, const PatchPartition& partition,
    const std::vector<std::vector<CMat>>& psf_blocks, const SolverConfig& cfg,
    int threads) {
  if (!cfg.gamma)
    throw std::invalid_argument("solve_patches: cfg.gamma must be resolved");
  const int b_count = partition.patch_count();
  if (static_cast<int>(psf_blocks.size()) != b_count)
    throw std::invalid_argument("solve_patches: missing PSF blocks");
  const int k_count = static_cast<int>(z.cols());

  PatchSolveResult result;
  result.solutions.resize(b_count);
  result.histories.resize(b_count);
  result.solve_seconds.resize(b_count);
  parallel_for(b_count, threads, [&](long b) {
    const Patch& patch = partition.patches[b];
    if (static_cast<int>(psf_blocks[b].size()) != k_count)
      throw std::invalid_argument("solve_patches: missing PSF block for group");
    std::vector<GroupSystem> local(k_count);
    for (int k = 0; k < k_count; ++k) {
      local[k].a = psf_blocks[b][k];
      local[k].y.resize(patch.size());
      for (long i = 0; i < patch.size(); ++i)
        local[k].y[i] = z(patch.indices[i], k);
    }
    const double t0 = now_seconds();
    try {
      SolveResult solved = solve_first_order(local, cfg);
      result.solutions[b] = std::move(solved.x);
      result.histories[b] = std::move(solved.history);
    } catch (const std::exception& e) {
      throw NumericError("patch " + std::to_string(b) + ": " + e.what());
    }
    result.solve_seconds[b] = now_seconds() - t0;
  });
  return result;
}

CMat splice(const std::vector<CMat>& patch_solutions,
            const PatchPartition& partition) {
  if (patch_solutions.size() != partition.patches.size())
    throw std::invalid_argument("splice: one solution per patch required");
  const long n = static_cast<long>(partition.grid_divisions[0]) *
                 partition.grid_divisions[1] * partition.grid_divisions[2];
  const long k_count =
      patch_solutions.empty() ? 0 : patch_solutions.front().cols();
  CMat x = CMat::Zero(n, k_count);
  for (std::size_t b = 0; b < patch_solutions.size(); ++b) {
    const Patch& patch = partition.patches[b];
    const CMat& sol = patch_solutions[b];
    if (sol.rows() != patch.size() || sol.cols() != k_count)
      throw std::invalid_argument("splice: patch solution shape mismatch");
    for (long i = 0; i < patch.size(); ++i)
      x.row(patch.indices[i]) += patch.weights[i] * sol.row(i);
  }
  return x;
}

std::string TimingReport::to_csv() const {
  std::ostringstream out;
  out.precision(9);
  out << "phase,patch,seconds,iterations\n";
  for (const auto& e : entries)
    out << e.phase << ',' << e.patch_index << ',' << std::fixed << e.seconds
        << ',' << e.iterations << '\n';
  return out.str();
}

FastReconstructResult fast_reconstruct(std::span<const GroupSystem> systems,
                                       const ImagingGrid& grid,
                                       const std::array<int, 3>& patch_dims,
                                       double overlap, const SolverConfig& cfg,
                                       int threads) {
  FastReconstructResult result;
  const int k_count = static_cast<int>(systems.size());

  double t0 = now_seconds();
  const CMat z = back_project(systems);
  result.timing.entries.push_back(
      {"back_project", -1, now_seconds() - t0, 0});

  t0 = now_seconds();
  const PatchPartition partition = partition_grid(grid, patch_dims, overlap);
  result.timing.entries.push_back({"partition", -1, now_seconds() - t0, 0});

  // Resolve the default regularization weight once, from the image-domain
  // back-projection stack, so every patch solves with the same gamma.
  SolverConfig patch_cfg = cfg;
  if (!patch_cfg.gamma) {
    CMat w(z.rows(), k_count);
    for (int k = 0; k < k_count; ++k)
      w.col(k) = systems[k].a.adjoint() * (systems[k].a * z.col(k));
    double max_row = 0.0;
    for (long i = 0; i < w.rows(); ++i)
      max_row = std::max(max_row, w.row(i).norm());
    patch_cfg.gamma = 0.02 * max_row;
  }
  result.gamma_used = *patch_cfg.gamma;

  t0 = now_seconds();
  std::vector<std::vector<CMat>> blocks(partition.patch_count());
  parallel_for(partition.patch_count(), threads, [&](long b) {
    blocks[b].reserve(k_count);
    for (int k = 0; k < k_count; ++k)
      blocks[b].push_back(psf_block(systems[k].a, partition.patches[b].indices));
  });
  result.timing.entries.push_back({"psf_blocks", -1, now_seconds() - t0, 0});

  PatchSolveResult solved = solve_patches(z, partition, blocks, patch_cfg,
                                          threads);
  for (int b = 0; b < partition.patch_count(); ++b)
    result.timing.entries.push_back(
        {"solve_patch", b, solved.solve_seconds[b],
         static_cast<long>(solved.histories[b].records.size())});

  t0 = now_seconds();
  result.x = splice(solved.solutions, partition);
  result.timing.entries.push_back({"splice", -1, now_seconds() - t0, 0});

  result.patch_histories = std::move(solved.histories);
  return result;
}

}  // namespace gri
