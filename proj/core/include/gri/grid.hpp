#pragma once

#include <array>
#include <vector>

#include "gri/types.hpp"

namespace gri {

/// Uniform voxelization of the box investigation domain.  Linear voxel index
/// runs x-fastest: n = ix + nx*(iy + ny*iz).
class ImagingGrid {
 public:
  ImagingGrid() = default;
  ImagingGrid(const Vec3& center, const Vec3& extents,
              const std::array<int, 3>& divisions);

  const Vec3& center() const { return center_; }
  const Vec3& extents() const { return extents_; }
  const std::array<int, 3>& divisions() const { return divisions_; }

  long voxel_count() const { return n_; }
  Vec3 spacing() const { return spacing_; }
  double voxel_volume() const { return spacing_[0] * spacing_[1] * spacing_[2]; }
  double voxel_diagonal() const { return spacing_.norm(); }

  Vec3 voxel_center(long n) const;
  Vec3 voxel_center(int ix, int iy, int iz) const;
  long index_of(int ix, int iy, int iz) const {
    return ix + static_cast<long>(divisions_[0]) *
                    (iy + static_cast<long>(divisions_[1]) * iz);
  }
  const std::vector<Vec3>& voxel_centers() const { return centers_; }

  Vec3 box_min() const { return center_ - 0.5 * extents_; }
  Vec3 box_max() const { return center_ + 0.5 * extents_; }

  bool contains(const Vec3& p) const;
  /// Euclidean distance from p to the grid box (0 inside).
  double distance_to_box(const Vec3& p) const;
  /// Index of the voxel whose center is nearest to p.
  long nearest_voxel(const Vec3& p) const;

  bool operator==(const ImagingGrid& other) const {
    return center_ == other.center_ && extents_ == other.extents_ &&
           divisions_ == other.divisions_;
  }

 private:
  Vec3 center_ = Vec3::Zero();
  Vec3 extents_ = Vec3::Ones();
  std::array<int, 3> divisions_{1, 1, 1};
  Vec3 spacing_ = Vec3::Ones();
  long n_ = 1;
  std::vector<Vec3> centers_;
};

}  // namespace gri
