#pragma once

// Numeric oracles used by the tests: a derivative-free minimizer for prox
// verification, a plain small-step proximal-gradient reference solver, and a
// finite-difference gradient.  None of these share code with the library
// operators they check.

#include <algorithm>
#include <functional>
#include <random>
#include <vector>

#include "gri/solver.hpp"
#include "gri/types.hpp"

namespace gri::testref {

using RealFn = std::function<double(const Eigen::VectorXd&)>;

/// Nelder-Mead with shrinking restarts; adequate for smooth-plus-kink convex
/// objectives in a dozen dimensions.
inline Eigen::VectorXd nelder_mead(const RealFn& f, Eigen::VectorXd x0,
                                   double radius, int rounds = 8,
                                   int iters_per_round = 400) {
  const int n = static_cast<int>(x0.size());
  Eigen::VectorXd best = x0;
  double best_val = f(best);
  for (int round = 0; round < rounds; ++round) {
    std::vector<Eigen::VectorXd> simplex(n + 1, best);
    std::vector<double> vals(n + 1);
    for (int i = 0; i < n; ++i) simplex[i + 1][i] += radius;
    for (int i = 0; i <= n; ++i) vals[i] = f(simplex[i]);

    for (int iter = 0; iter < iters_per_round; ++iter) {
      std::vector<int> order(n + 1);
      for (int i = 0; i <= n; ++i) order[i] = i;
      std::sort(order.begin(), order.end(),
                [&](int a, int b) { return vals[a] < vals[b]; });
      const int lo = order[0], hi = order[n], second_hi = order[n - 1];

      Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
      for (int i = 0; i <= n; ++i)
        if (i != hi) centroid += simplex[i];
      centroid /= n;

      const Eigen::VectorXd reflected = centroid + (centroid - simplex[hi]);
      const double fr = f(reflected);
      if (fr < vals[lo]) {
        const Eigen::VectorXd expanded =
            centroid + 2.0 * (centroid - simplex[hi]);
        const double fe = f(expanded);
        if (fe < fr) {
          simplex[hi] = expanded;
          vals[hi] = fe;
        } else {
          simplex[hi] = reflected;
          vals[hi] = fr;
        }
      } else if (fr < vals[second_hi]) {
        simplex[hi] = reflected;
        vals[hi] = fr;
      } else {
        const Eigen::VectorXd contracted =
            centroid + 0.5 * (simplex[hi] - centroid);
        const double fc = f(contracted);
        if (fc < vals[hi]) {
          simplex[hi] = contracted;
          vals[hi] = fc;
        } else {
          for (int i = 0; i <= n; ++i) {
            if (i == lo) continue;
            simplex[i] = simplex[lo] + 0.5 * (simplex[i] - simplex[lo]);
            vals[i] = f(simplex[i]);
          }
        }
      }
    }
    for (int i = 0; i <= n; ++i)
      if (vals[i] < best_val) {
        best_val = vals[i];
        best = simplex[i];
      }
    radius *= 0.1;
  }
  return best;
}

inline double inner_norm_value(const Eigen::RowVectorXcd& row, InnerNorm p) {
  switch (p) {
    case InnerNorm::L1: return row.cwiseAbs().sum();
    case InnerNorm::L2: return row.norm();
    default: return row.size() ? row.cwiseAbs().maxCoeff() : 0.0;
  }
}

inline double prox_objective(const Eigen::RowVectorXcd& x,
                             const Eigen::RowVectorXcd& v, double tau,
                             InnerNorm p) {
  return 0.5 * (x - v).squaredNorm() + tau * inner_norm_value(x, p);
}

inline double golden_section(const std::function<double(double)>& f, double lo,
                             double hi, int iters = 160) {
  const double phi = 0.6180339887498949;
  double a = lo, b = hi;
  double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int i = 0; i < iters; ++i) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - phi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + phi * (b - a);
      f2 = f(x2);
    }
  }
  return std::min(f1, f2);
}

/// Numeric minimum of 0.5|x - v|^2 + tau ||x||_p over complex rows.  Any
/// minimizer aligns with the phases of v (the quadratic term is minimized at
/// fixed magnitudes by phase alignment and the norm ignores phases), so the
/// search runs both in the full complex space and over magnitudes, plus
/// independent 1-D reductions where the geometry admits them.
inline double prox_min_oracle(const Eigen::RowVectorXcd& v, double tau,
                              InnerNorm p) {
  const int k = static_cast<int>(v.size());
  const auto unpack = [&](const Eigen::VectorXd& u) {
    Eigen::RowVectorXcd x(k);
    for (int i = 0; i < k; ++i) x[i] = cplx(u[2 * i], u[2 * i + 1]);
    return x;
  };
  const RealFn f_full = [&](const Eigen::VectorXd& u) {
    return prox_objective(unpack(u), v, tau, p);
  };

  Eigen::VectorXd mags(k);
  for (int i = 0; i < k; ++i) mags[i] = std::abs(v[i]);
  const auto mag_objective = [&](const Eigen::VectorXd& m) {
    double quad = 0.0;
    for (int i = 0; i < k; ++i) quad += (m[i] - mags[i]) * (m[i] - mags[i]);
    double norm = 0.0;
    switch (p) {
      case InnerNorm::L1: norm = m.cwiseAbs().sum(); break;
      case InnerNorm::L2: norm = m.norm(); break;
      case InnerNorm::LInf: norm = m.cwiseAbs().maxCoeff(); break;
    }
    return 0.5 * quad + tau * norm;
  };

  const double scale = std::max(1.0, v.norm() + tau);
  double best = std::numeric_limits<double>::infinity();

  Eigen::VectorXd packed(2 * k);
  for (int i = 0; i < k; ++i) {
    packed[2 * i] = v[i].real();
    packed[2 * i + 1] = v[i].imag();
  }
  for (const Eigen::VectorXd& s :
       {packed, Eigen::VectorXd(Eigen::VectorXd::Zero(2 * k)),
        Eigen::VectorXd(0.5 * packed)})
    best = std::min(best, f_full(nelder_mead(f_full, s, 0.5 * scale, 10)));

  for (const Eigen::VectorXd& s :
       {mags, Eigen::VectorXd(Eigen::VectorXd::Zero(k)),
        Eigen::VectorXd(0.5 * mags)})
    best = std::min(best, mag_objective(nelder_mead(mag_objective, s,
                                                    0.5 * scale, 10)));

  if (p == InnerNorm::L1) {
    // Separable: 1-D golden section per coordinate.
    double total = 0.0;
    for (int i = 0; i < k; ++i) {
      const double w = mags[i];
      total += golden_section(
          [&](double m) { return 0.5 * (m - w) * (m - w) + tau * std::abs(m); },
          0.0, w + tau);
    }
    best = std::min(best, total);
  }
  if (p == InnerNorm::L2) {
    // Any minimizer is radial in the magnitude vector.
    const double w_norm = mags.norm();
    best = std::min(
        best, golden_section(
                  [&](double s) {
                    return 0.5 * (s - 1.0) * (s - 1.0) * w_norm * w_norm +
                           tau * std::abs(s) * w_norm;
                  },
                  0.0, 1.5));
  }
  if (p == InnerNorm::LInf) {
    // At a fixed peak level c, each magnitude independently minimizes its
    // quadratic on [0, c], i.e. clips to min(w_i, c); minimize over c.
    const double w_max = mags.size() ? mags.maxCoeff() : 0.0;
    best = std::min(best, golden_section(
                              [&](double c) {
                                double quad = 0.0;
                                for (int i = 0; i < k; ++i) {
                                  const double over = std::max(mags[i] - c, 0.0);
                                  quad += over * over;
                                }
                                return 0.5 * quad + tau * c;
                              },
                              0.0, w_max + 1e-12));
  }
  return best;
}

/// Reference solver for the grouped objective: plain proximal gradient with
/// step 1/L, hand-rolled row block-shrinkage (p = 2 only).
inline CMat reference_pgd_l2(const std::vector<GroupSystem>& systems,
                             double gamma, long iterations) {
  const long n = systems[0].a.cols();
  const int k_count = static_cast<int>(systems.size());
  double lips = 0.0;
  for (const auto& s : systems) {
    Eigen::JacobiSVD<CMat> svd(s.a);
    const double smax = svd.singularValues()(0);
    lips = std::max(lips, smax * smax);
  }
  lips *= 1.001;

  CMat x = CMat::Zero(n, k_count);
  const double tau = gamma / lips;
  for (long it = 0; it < iterations; ++it) {
    CMat u(n, k_count);
    for (int k = 0; k < k_count; ++k)
      u.col(k) = x.col(k) - (1.0 / lips) * (systems[k].a.adjoint() *
                                            (systems[k].a * x.col(k) -
                                             systems[k].y));
    for (long row = 0; row < n; ++row) {
      const double norm = u.row(row).norm();
      if (norm <= tau)
        u.row(row).setZero();
      else
        u.row(row) *= (1.0 - tau / norm);
    }
    x = std::move(u);
  }
  return x;
}

inline double grouped_objective(const std::vector<GroupSystem>& systems,
                                const CMat& x, double gamma, InnerNorm p) {
  double phi = 0.0;
  for (std::size_t k = 0; k < systems.size(); ++k)
    phi += 0.5 * (systems[k].y - systems[k].a * x.col(k)).squaredNorm();
  double omega = 0.0;
  for (long row = 0; row < x.rows(); ++row)
    omega += inner_norm_value(x.row(row), p);
  return phi + gamma * omega;
}

/// Central finite differences of 0.5|y - A x|^2 over the real and imaginary
/// parts of x, reassembled as a complex vector.
inline CVec fd_gradient(const CMat& a, const CVec& x, const CVec& y,
                        double h = 1e-6) {
  const auto phi = [&](const CVec& xx) {
    return 0.5 * (y - a * xx).squaredNorm();
  };
  CVec g(x.size());
  for (long i = 0; i < x.size(); ++i) {
    CVec xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    const double dre = (phi(xp) - phi(xm)) / (2.0 * h);
    xp = x;
    xm = x;
    xp[i] += cplx(0.0, h);
    xm[i] -= cplx(0.0, h);
    const double dim = (phi(xp) - phi(xm)) / (2.0 * h);
    g[i] = cplx(dre, dim);
  }
  return g;
}

inline std::mt19937_64 seeded_rng(std::uint64_t seed) {
  return std::mt19937_64(seed);
}

inline CVec random_cvec(std::mt19937_64& rng, long n, double scale = 1.0) {
  std::normal_distribution<double> d(0.0, scale);
  CVec v(n);
  for (long i = 0; i < n; ++i) v[i] = cplx(d(rng), d(rng));
  return v;
}

inline CMat random_cmat(std::mt19937_64& rng, long rows, long cols,
                        double scale = 1.0) {
  std::normal_distribution<double> d(0.0, scale);
  CMat m(rows, cols);
  for (long j = 0; j < cols; ++j)
    for (long i = 0; i < rows; ++i) m(i, j) = cplx(d(rng), d(rng));
  return m;
}

inline Vec3 random_point(std::mt19937_64& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> d(-scale, scale);
  return {d(rng), d(rng), d(rng)};
}

}  // namespace gri::testref
