#pragma once

#include <array>

#include "gri/types.hpp"

namespace gri {

struct SsimParams {
  double dynamic_range = 0.0;  // L; <= 0 derives max over both volumes
  double k1 = 0.01;
  double k2 = 0.03;
  int window = 0;  // cubic window size in voxels; 0 = min(7, smallest dim)
};

/// Per-voxel root-sum-square of |X(n, k)| across k, normalized by its
/// maximum; an all-zero stack maps to the all-zero image.
RVec composite_image(const CMat& x);

/// Mean over sliding cubic windows of
/// [(2 mu_a mu_b + C1)(2 cov + C2)] / [(mu_a^2 + mu_b^2 + C1)(var_a + var_b + C2)]
/// with C1 = (k1 L)^2, C2 = (k2 L)^2 and uniform window statistics.
double ssim(const RVec& vol_a, const RVec& vol_b,
            const std::array<int, 3>& dims, const SsimParams& params = {});

}  // namespace gri
