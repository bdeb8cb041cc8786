#include "gri/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gri {

RVec composite_image(const CMat& x) {
  RVec img(x.rows());
  for (long n = 0; n < x.rows(); ++n) img[n] = x.row(n).norm();
  const double peak = img.size() ? img.maxCoeff() : 0.0;
  if (peak > 0.0) img /= peak;
  return img;
}

double ssim(const RVec& vol_a, const RVec& vol_b,
            const std::array<int, 3>& dims, const SsimParams& params) {
  const long n = static_cast<long>(dims[0]) * dims[1] * dims[2];
  if (vol_a.size() != n || vol_b.size() != n)
    throw std::invalid_argument("ssim: volume size does not match dims");
  const int min_dim = std::min({dims[0], dims[1], dims[2]});
  int w = params.window;
  if (w == 0) w = std::min(7, min_dim);
  if (w < 1 || w > min_dim)
    throw std::invalid_argument("ssim: window larger than grid");
  if (!(params.k1 > 0.0) || !(params.k2 > 0.0))
    throw std::invalid_argument("ssim: k1, k2 must be positive");

  double dyn = params.dynamic_range;
  if (dyn <= 0.0) {
    dyn = std::max(vol_a.size() ? vol_a.maxCoeff() : 0.0,
                   vol_b.size() ? vol_b.maxCoeff() : 0.0);
    if (dyn <= 0.0) dyn = 1.0;
  }
  const double c1 = params.k1 * dyn * params.k1 * dyn;
  const double c2 = params.k2 * dyn * params.k2 * dyn;

  const auto at = [&](const RVec& v, int x, int y, int z) {
    return v[x + static_cast<long>(dims[0]) * (y + static_cast<long>(dims[1]) * z)];
  };

  const double count = static_cast<double>(w) * w * w;
  double total = 0.0;
  long windows = 0;
  for (int z0 = 0; z0 + w <= dims[2]; ++z0)
    for (int y0 = 0; y0 + w <= dims[1]; ++y0)
      for (int x0 = 0; x0 + w <= dims[0]; ++x0) {
        double sa = 0.0, sb = 0.0, saa = 0.0, sbb = 0.0, sab = 0.0;
        for (int z = z0; z < z0 + w; ++z)
          for (int y = y0; y < y0 + w; ++y)
            for (int x = x0; x < x0 + w; ++x) {
              const double a = at(vol_a, x, y, z);
              const double b = at(vol_b, x, y, z);
              sa += a;
              sb += b;
              saa += a * a;
              sbb += b * b;
              sab += a * b;
            }
        const double mu_a = sa / count;
        const double mu_b = sb / count;
        const double var_a = saa / count - mu_a * mu_a;
        const double var_b = sbb / count - mu_b * mu_b;
        const double cov = sab / count - mu_a * mu_b;
        total += (2.0 * mu_a * mu_b + c1) * (2.0 * cov + c2) /
                 ((mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2));
        ++windows;
      }
  return total / static_cast<double>(windows);
}

}  // namespace gri
