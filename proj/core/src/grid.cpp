#include "gri/grid.hpp"

#include <algorithm>
#include <cmath>

namespace gri {

ImagingGrid::ImagingGrid(const Vec3& center, const Vec3& extents,
                         const std::array<int, 3>& divisions)
    : center_(center), extents_(extents), divisions_(divisions) {
  for (int a = 0; a < 3; ++a) {
    if (divisions_[a] < 1)
      throw ConfigError("grid.divisions[" + std::to_string(a) + "]",
                        "must be a positive integer");
    if (!(extents_[a] > 0.0))
      throw ConfigError("grid.extents[" + std::to_string(a) + "]",
                        "must be positive");
    spacing_[a] = extents_[a] / divisions_[a];
  }
  n_ = static_cast<long>(divisions_[0]) * divisions_[1] * divisions_[2];
  centers_.reserve(n_);
  for (int iz = 0; iz < divisions_[2]; ++iz)
    for (int iy = 0; iy < divisions_[1]; ++iy)
      for (int ix = 0; ix < divisions_[0]; ++ix)
        centers_.push_back(voxel_center(ix, iy, iz));
}

Vec3 ImagingGrid::voxel_center(int ix, int iy, int iz) const {
  const Vec3 lo = box_min();
  return {lo[0] + (ix + 0.5) * spacing_[0], lo[1] + (iy + 0.5) * spacing_[1],
          lo[2] + (iz + 0.5) * spacing_[2]};
}

Vec3 ImagingGrid::voxel_center(long n) const {
  const int ix = static_cast<int>(n % divisions_[0]);
  const int iy = static_cast<int>((n / divisions_[0]) % divisions_[1]);
  const int iz = static_cast<int>(n / (static_cast<long>(divisions_[0]) *
                                       divisions_[1]));
  return voxel_center(ix, iy, iz);
}

bool ImagingGrid::contains(const Vec3& p) const {
  const Vec3 lo = box_min();
  const Vec3 hi = box_max();
  for (int a = 0; a < 3; ++a)
    if (p[a] < lo[a] || p[a] > hi[a]) return false;
  return true;
}

double ImagingGrid::distance_to_box(const Vec3& p) const {
  const Vec3 lo = box_min();
  const Vec3 hi = box_max();
  double d2 = 0.0;
  for (int a = 0; a < 3; ++a) {
    const double d = std::max({lo[a] - p[a], 0.0, p[a] - hi[a]});
    d2 += d * d;
  }
  return std::sqrt(d2);
}

long ImagingGrid::nearest_voxel(const Vec3& p) const {
  const Vec3 lo = box_min();
  int idx[3];
  for (int a = 0; a < 3; ++a) {
    const int i = static_cast<int>(std::floor((p[a] - lo[a]) / spacing_[a]));
    idx[a] = std::clamp(i, 0, divisions_[a] - 1);
  }
  return index_of(idx[0], idx[1], idx[2]);
}

}  // namespace gri
