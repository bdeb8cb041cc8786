#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gri/types.hpp"

namespace gri {

/// One linear system of the grouped model: y = A x.
struct GroupSystem {
  CMat a;
  CVec y;
};

/// Inner (across-group) exponent of the mixed norm; the outer exponent is
/// fixed at 1.
enum class InnerNorm { L1, L2, LInf };

InnerNorm parse_inner_norm(const std::string& s);
std::string inner_norm_name(InnerNorm p);

struct SolverConfig {
  std::optional<double> gamma;  // regularization weight; default 0.02 * max
                                // row norm of the back-projection stack
  InnerNorm p = InnerNorm::L2;
  int max_iters = 200;
  double tol = 1e-4;  // relative composite-objective change
  std::optional<double> lipschitz_override;
};

struct IterationRecord {
  int iteration = 0;
  double phi = 0.0;       // data fidelity
  double omega = 0.0;     // penalty value
  double objective = 0.0; // phi + gamma * omega
  std::vector<double> step_factors;    // alpha_(k)
  std::vector<double> residual_norms;  // |y_(k) - A_(k) x_(k)|
  int halvings = 0;

  double max_step() const;
};

struct ConvergenceHistory {
  std::vector<IterationRecord> records;
  double gamma_used = 0.0;

  /// CSV with columns: iteration, phi, omega, objective, max_step.
  std::string to_csv() const;
};

/// Sum over voxels of the inner p-norm of each row of X.
double mixed_norm(const CMat& x, InnerNorm p);

/// Row-independent proximal operator of tau * mixed_norm(., p):
/// p=2 block shrinkage, p=1 complex soft threshold, p=inf magnitude clipping
/// (Moreau decomposition against the l1 ball); phases are preserved.
CMat prox_mixed_norm(const CMat& v, double tau, InnerNorm p);

/// Gradient of 0.5 |y - A x|^2: A^* (A x - y).
CVec data_fidelity_grad(const CMat& a, const CVec& x, const CVec& y);

/// Exact minimizer of the quadratic fidelity along -d:
/// alpha = -|d|^2 / |A d|^2.
double exact_line_search_step(const CVec& d, const CMat& a);

struct SolveResult {
  CMat x;  // N x K reflectivity stack
  ConvergenceHistory history;
};

/// First-order iteration: per-group gradients with exact line-search step
/// factors, applied at their most conservative shared value, then joint
/// proximal fusion across groups with threshold gamma * |step|.  If the
/// composite objective would increase, the step is halved and the iteration
/// redone (at most 20 times).
SolveResult solve_first_order(const std::vector<GroupSystem>& systems,
                              const SolverConfig& cfg);

}  // namespace gri
