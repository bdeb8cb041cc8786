#include "gri/solver.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace gri {

InnerNorm parse_inner_norm(const std::string& s) {
  if (s == "1") return InnerNorm::L1;
  if (s == "2") return InnerNorm::L2;
  if (s == "inf" || s == "Inf" || s == "INF") return InnerNorm::LInf;
  throw ConfigError("p", "expected one of 1, 2, inf; got '" + s + "'");
}

std::string inner_norm_name(InnerNorm p) {
  switch (p) {
    case InnerNorm::L1: return "1";
    case InnerNorm::L2: return "2";
    default: return "inf";
  }
}

double mixed_norm(const CMat& x, InnerNorm p) {
  double total = 0.0;
  for (long n = 0; n < x.rows(); ++n) {
    const auto row = x.row(n);
    switch (p) {
      case InnerNorm::L1: total += row.cwiseAbs().sum(); break;
      case InnerNorm::L2: total += row.norm(); break;
      case InnerNorm::LInf:
        total += row.size() ? row.cwiseAbs().maxCoeff() : 0.0;
        break;
    }
  }
  return total;
}

namespace {

void prox_row_l2(Eigen::RowVectorXcd& row, double tau) {
  const double norm = row.norm();
  if (norm <= tau) {
    row.setZero();
  } else {
    row *= (1.0 - tau / norm);
  }
}

void prox_row_l1(Eigen::RowVectorXcd& row, double tau) {
  for (long i = 0; i < row.size(); ++i) {
    const double mag = std::abs(row[i]);
    row[i] = mag <= tau ? cplx(0.0, 0.0) : row[i] * ((mag - tau) / mag);
  }
}

// prox of tau*max|.|: clip magnitudes at the level c solving
// sum (|v_i| - c)_+ = tau (Moreau decomposition against the l1 ball).
void prox_row_linf(Eigen::RowVectorXcd& row, double tau) {
  std::vector<double> mags(row.size());
  for (long i = 0; i < row.size(); ++i) mags[i] = std::abs(row[i]);
  const double total = std::accumulate(mags.begin(), mags.end(), 0.0);
  if (total <= tau) {
    row.setZero();
    return;
  }
  std::sort(mags.begin(), mags.end(), std::greater<>());
  double cum = 0.0;
  double level = 0.0;
  for (std::size_t j = 0; j < mags.size(); ++j) {
    cum += mags[j];
    const double candidate = (cum - tau) / static_cast<double>(j + 1);
    if (j + 1 == mags.size() || candidate >= mags[j + 1]) {
      level = candidate;
      break;
    }
  }
  for (long i = 0; i < row.size(); ++i) {
    const double mag = std::abs(row[i]);
    if (mag > level) row[i] *= level / mag;
  }
}

}  // namespace

CMat prox_mixed_norm(const CMat& v, double tau, InnerNorm p) {
  if (tau < 0.0) throw std::invalid_argument("prox_mixed_norm: tau < 0");
  CMat x = v;
  if (tau == 0.0) return x;
  Eigen::RowVectorXcd row;
  for (long n = 0; n < x.rows(); ++n) {
    row = x.row(n);
    switch (p) {
      case InnerNorm::L1: prox_row_l1(row, tau); break;
      case InnerNorm::L2: prox_row_l2(row, tau); break;
      case InnerNorm::LInf: prox_row_linf(row, tau); break;
    }
    x.row(n) = row;
  }
  return x;
}

CVec data_fidelity_grad(const CMat& a, const CVec& x, const CVec& y) {
  if (x.size() != a.cols() || y.size() != a.rows())
    throw std::invalid_argument("data_fidelity_grad: dimension mismatch");
  return a.adjoint() * (a * x - y);
}

double exact_line_search_step(const CVec& d, const CMat& a) {
  const double dd = d.squaredNorm();
  if (dd == 0.0)
    throw std::invalid_argument("exact_line_search_step: zero direction");
  const double ad = (a * d).squaredNorm();
  if (ad == 0.0)
    throw NumericError("exact_line_search_step: direction lies in the null "
                       "space of A");
  return -dd / ad;
}

double IterationRecord::max_step() const {
  double m = 0.0;
  for (double a : step_factors) m = std::max(m, std::abs(a));
  return m;
}

std::string ConvergenceHistory::to_csv() const {
  std::ostringstream out;
  out.precision(17);
  out << "iteration,phi,omega,objective,max_step\n";
  for (const auto& r : records)
    out << r.iteration << ',' << r.phi << ',' << r.omega << ',' << r.objective
        << ',' << r.max_step() << '\n';
  return out.str();
}

namespace {

double fidelity(const std::vector<GroupSystem>& systems, const CMat& x,
                std::vector<double>* residuals = nullptr) {
  double phi = 0.0;
  if (residuals) residuals->clear();
  for (std::size_t k = 0; k < systems.size(); ++k) {
    const double r = (systems[k].y - systems[k].a * x.col(k)).norm();
    phi += 0.5 * r * r;
    if (residuals) residuals->push_back(r);
  }
  return phi;
}

}  // namespace

SolveResult solve_first_order(const std::vector<GroupSystem>& systems,
                              const SolverConfig& cfg) {
  if (systems.empty())
    throw std::invalid_argument("solve_first_order: no groups");
  const long n = systems[0].a.cols();
  const int k_count = static_cast<int>(systems.size());
  for (const auto& s : systems) {
    if (s.a.cols() != n)
      throw std::invalid_argument("solve_first_order: group column mismatch");
    if (s.y.size() != s.a.rows())
      throw std::invalid_argument("solve_first_order: y/A row mismatch");
  }
  if (!(cfg.tol > 0.0)) throw std::invalid_argument("solve_first_order: tol");
  if (cfg.max_iters < 1)
    throw std::invalid_argument("solve_first_order: max_iters");

  double gamma;
  if (cfg.gamma) {
    gamma = *cfg.gamma;
    if (gamma < 0.0) throw std::invalid_argument("solve_first_order: gamma");
  } else {
    // Scale-free default from the back-projection stack.
    CMat z(n, k_count);
    for (int k = 0; k < k_count; ++k)
      z.col(k) = systems[k].a.adjoint() * systems[k].y;
    double max_row = 0.0;
    for (long i = 0; i < n; ++i) max_row = std::max(max_row, z.row(i).norm());
    gamma = 0.02 * max_row;
  }

  CMat x = CMat::Zero(n, k_count);
  SolveResult result;
  result.history.gamma_used = gamma;
  double obj_prev = fidelity(systems, x) + gamma * mixed_norm(x, cfg.p);

  std::vector<CVec> grads(k_count);
  std::vector<double> alphas(k_count);
  std::vector<double> residuals;
  for (int iter = 1; iter <= cfg.max_iters; ++iter) {
    // Per-group exact line-search factors; the applied step is their most
    // conservative value, shared across groups.  A shared step keeps the
    // prox fixed point at the minimizer of the composite objective, and
    // staying at or below every group's exact step preserves the per-group
    // fidelity descent guarantee.
    double step = std::numeric_limits<double>::infinity();
    for (int k = 0; k < k_count; ++k) {
      grads[k] = data_fidelity_grad(systems[k].a, x.col(k), systems[k].y);
      if (cfg.lipschitz_override) {
        step = 1.0 / *cfg.lipschitz_override;
      } else if (grads[k].squaredNorm() > 0.0) {
        step = std::min(step,
                        -exact_line_search_step(grads[k], systems[k].a));
      }
    }
    if (!std::isfinite(step)) step = 0.0;  // all gradients vanished

    // Step halving keeps the composite objective non-increasing.
    CMat x_next;
    double obj_next = 0.0, phi_next = 0.0, omega_next = 0.0;
    int halvings = 0;
    for (;; ++halvings) {
      CMat u(n, k_count);
      for (int k = 0; k < k_count; ++k) u.col(k) = x.col(k) - step * grads[k];
      x_next = prox_mixed_norm(u, gamma * step, cfg.p);
      phi_next = fidelity(systems, x_next, &residuals);
      omega_next = mixed_norm(x_next, cfg.p);
      obj_next = phi_next + gamma * omega_next;
      if (!std::isfinite(obj_next))
        throw NumericError("solve_first_order: non-finite objective");
      if (obj_next <= obj_prev || halvings >= 20) break;
      step *= 0.5;
    }
    std::fill(alphas.begin(), alphas.end(), -step);
    if (obj_next > obj_prev) {
      // Exhausted halvings without descent; keep the previous iterate.
      x_next = x;
      phi_next = fidelity(systems, x_next, &residuals);
      omega_next = mixed_norm(x_next, cfg.p);
      obj_next = phi_next + gamma * omega_next;
    }

    IterationRecord rec;
    rec.iteration = iter;
    rec.phi = phi_next;
    rec.omega = omega_next;
    rec.objective = obj_next;
    rec.step_factors = alphas;
    rec.residual_norms = residuals;
    rec.halvings = halvings;
    result.history.records.push_back(std::move(rec));

    const double change = std::abs(obj_prev - obj_next);
    x = std::move(x_next);
    const bool converged =
        change <= cfg.tol * std::max(std::abs(obj_prev), 1e-300);
    obj_prev = obj_next;
    if (converged) break;
  }

  result.x = std::move(x);
  return result;
}

}  // namespace gri
