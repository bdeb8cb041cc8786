#include "gri/em.hpp"

#include <cmath>
#include <stdexcept>

#include "parallel.hpp"

namespace gri {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

Axis parse_axis(const std::string& s) {
  if (s == "x" || s == "X") return Axis::X;
  if (s == "y" || s == "Y") return Axis::Y;
  if (s == "z" || s == "Z") return Axis::Z;
  throw ConfigError("rx_component", "expected one of x, y, z; got '" + s + "'");
}

std::string axis_name(Axis a) {
  switch (a) {
    case Axis::X: return "x";
    case Axis::Y: return "y";
    default: return "z";
  }
}

cplx scalar_green(const Vec3& r, const Vec3& r_src, const Wavenumber& k) {
  const double dist = (r - r_src).norm();
  if (dist <= 0.0)
    throw std::domain_error("scalar_green: coincident source and field points");
  return std::exp(cplx(0.0, k.k0 * dist)) / (4.0 * kPi * dist);
}

CMat3 dyadic_green(const Vec3& r, const Vec3& r_src, const Wavenumber& k) {
  const Vec3 sep = r - r_src;
  const double dist = sep.norm();
  if (dist <= 0.0)
    throw std::domain_error("dyadic_green: coincident source and field points");
  if (k.k0 <= 0.0)
    throw std::domain_error("dyadic_green: requires k0 > 0");

  const Vec3 rhat = sep / dist;
  const Eigen::Matrix3d outer = rhat * rhat.transpose();
  const Eigen::Matrix3d eye = Eigen::Matrix3d::Identity();
  const double kr = k.k0 * dist;
  const cplx near_terms = cplx(1.0 / (kr * kr), 0.0) - cplx(0.0, 1.0 / kr);
  const cplx g = std::exp(cplx(0.0, kr)) / (4.0 * kPi * dist);

  return g * ((3.0 * outer - eye).cast<cplx>() * near_terms +
              (eye - outer).cast<cplx>());
}

CVec3 incident_field(const Vec3& r, const Vec3& tx_position,
                     const Vec3& tx_polarization, const Wavenumber& k,
                     GreensMode mode) {
  const cplx scale(0.0, k.omega * kMu0);
  if (mode == GreensMode::Scalar)
    return scale * scalar_green(r, tx_position, k) *
           tx_polarization.cast<cplx>();
  return scale * (dyadic_green(r, tx_position, k) *
                  tx_polarization.cast<cplx>());
}

CMat radiated_matrix(std::span<const Vec3> points,
                     std::span<const CVec3> fields, double voxel_volume,
                     std::span<const Vec3> rx_positions, const Wavenumber& k,
                     Axis rx_component, GreensMode mode, int threads) {
  if (points.size() != fields.size())
    throw std::invalid_argument("radiated_matrix: one field per point");
  const long s_count = static_cast<long>(rx_positions.size());
  const long n_count = static_cast<long>(points.size());
  const int comp = static_cast<int>(rx_component);
  const cplx scale = cplx(0.0, k.omega * kMu0) * voxel_volume;
  CMat a(s_count, n_count);
  parallel_for(s_count, threads, [&](long s) {
    for (long n = 0; n < n_count; ++n) {
      if (mode == GreensMode::Scalar) {
        a(s, n) = scale * scalar_green(rx_positions[s], points[n], k) *
                  fields[n][comp];
      } else {
        const CMat3 g = dyadic_green(rx_positions[s], points[n], k);
        a(s, n) = scale * (g.row(comp) * fields[n])(0);
      }
    }
  });
  return a;
}

CMat assemble_measurement_entries(std::span<const Vec3> voxel_centers,
                                  double voxel_volume,
                                  std::span<const Vec3> rx_positions,
                                  const Transmitter& tx, const Wavenumber& k,
                                  Axis rx_component, GreensMode mode,
                                  int threads) {
  // Incident field at each voxel is shared by all rows.
  std::vector<CVec3> e_in(voxel_centers.size());
  for (std::size_t n = 0; n < voxel_centers.size(); ++n)
    e_in[n] =
        incident_field(voxel_centers[n], tx.position, tx.polarization, k, mode);
  return radiated_matrix(voxel_centers, e_in, voxel_volume, rx_positions, k,
                         rx_component, mode, threads);
}

MeasurementMatrix assemble_measurement_matrix(
    const ImagingGrid& grid, std::span<const Vec3> rx_positions,
    const Transmitter& tx, const Wavenumber& k, Axis rx_component,
    GreensMode mode, int threads) {
  const double clearance = grid.voxel_diagonal();
  if (grid.distance_to_box(tx.position) < clearance)
    throw std::invalid_argument(
        "assemble_measurement_matrix: transmitter closer than one voxel "
        "diagonal to the grid");
  for (const Vec3& rx : rx_positions)
    if (grid.distance_to_box(rx) < clearance)
      throw std::invalid_argument(
          "assemble_measurement_matrix: receiver closer than one voxel "
          "diagonal to the grid");

  MeasurementMatrix m;
  m.entries = assemble_measurement_entries(grid.voxel_centers(),
                                           grid.voxel_volume(), rx_positions,
                                           tx, k, rx_component, mode, threads);
  return m;
}

CVec apply_forward(const CMat& a, const CVec& x) {
  if (x.size() != a.cols())
    throw std::invalid_argument("apply_forward: dimension mismatch");
  return a * x;
}

CVec apply_adjoint(const CMat& a, const CVec& y) {
  if (y.size() != a.rows())
    throw std::invalid_argument("apply_adjoint: dimension mismatch");
  return a.adjoint() * y;
}

}  // namespace gri
