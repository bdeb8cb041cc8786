#pragma once

#include <span>
#include <vector>

#include "gri/grid.hpp"
#include "gri/types.hpp"

namespace gri {

/// Operational wavenumber, k0 = omega / c.
struct Wavenumber {
  double k0 = 0.0;     // rad/m
  double omega = 0.0;  // rad/s

  static Wavenumber from_frequency(double hz) {
    const double w = 2.0 * 3.14159265358979323846 * hz;
    return {w / kSpeedOfLight, w};
  }
};

/// Dipole transmitter: position plus unit polarization.
struct Transmitter {
  Vec3 position = Vec3::Zero();
  Vec3 polarization = Vec3::UnitZ();
};

enum class GreensMode { Dyadic, Scalar };

/// One S-by-N system block, tagged with its (frequency, transmitter) channel.
struct MeasurementMatrix {
  CMat entries;      // S x N
  int freq_index = 0;
  int tx_index = 0;
};

/// e^{i k0 R} / (4 pi R).  Valid for k0 = 0 (static limit).
cplx scalar_green(const Vec3& r, const Vec3& r_src, const Wavenumber& k);

/// Free-space dyadic Green's function:
///   g(R) [ (3 RR^T - I)(1/(k0 R)^2 - i/(k0 R)) + (I - RR^T) ].
/// Throws std::domain_error for coincident points or k0 = 0.
CMat3 dyadic_green(const Vec3& r, const Vec3& r_src, const Wavenumber& k);

/// Field of a unit-moment elementary dipole: E_in = i w mu0 G(r, tx) p.
CVec3 incident_field(const Vec3& r, const Vec3& tx_position,
                     const Vec3& tx_polarization, const Wavenumber& k,
                     GreensMode mode = GreensMode::Dyadic);

/// Radiation of per-point source fields to the receivers:
/// entry (s, m) = i w mu0 * dV * [G(r_s, p_m) field_m] . e_component.
CMat radiated_matrix(std::span<const Vec3> points,
                     std::span<const CVec3> fields, double voxel_volume,
                     std::span<const Vec3> rx_positions, const Wavenumber& k,
                     Axis rx_component, GreensMode mode = GreensMode::Dyadic,
                     int threads = 1);

/// Entry (s, n) = i w mu0 * dV * [G(r_s, r_n) E_in(r_n)] . e_component.
/// Voxel-center overload; quadrature weight dV passed explicitly.
CMat assemble_measurement_entries(std::span<const Vec3> voxel_centers,
                                  double voxel_volume,
                                  std::span<const Vec3> rx_positions,
                                  const Transmitter& tx, const Wavenumber& k,
                                  Axis rx_component,
                                  GreensMode mode = GreensMode::Dyadic,
                                  int threads = 1);

/// Assembles the S x N block for one channel over the grid voxels.
/// Requires every sensor to sit at least one voxel diagonal outside the grid
/// box; violations throw std::invalid_argument.
MeasurementMatrix assemble_measurement_matrix(
    const ImagingGrid& grid, std::span<const Vec3> rx_positions,
    const Transmitter& tx, const Wavenumber& k, Axis rx_component,
    GreensMode mode = GreensMode::Dyadic, int threads = 1);

CVec apply_forward(const CMat& a, const CVec& x);
CVec apply_adjoint(const CMat& a, const CVec& y);

}  // namespace gri
