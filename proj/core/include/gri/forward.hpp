#pragma once

#include <vector>

#include "gri/scene.hpp"
#include "gri/solver.hpp"

namespace gri {

/// Measured data for one channel group: the stacked y_(k) over the group's
/// channels (receiver index fastest, channels in (t, f) order).
struct GroupMeasurement {
  std::vector<ChannelId> channels;
  CVec y;
};

/// The grouped data sets y_(k), k = 1..K.
struct MeasurementSet {
  int receiver_count = 0;
  std::vector<GroupMeasurement> groups;

  int group_count() const { return static_cast<int>(groups.size()); }
};

/// Single-scattering synthetic data: each scatterer contributes
/// a * i w mu0 * dV * [G(r_s, p) E_in(p)]_c per channel.  Scatterers on voxel
/// centers reproduce the corresponding measurement-matrix columns exactly.
MeasurementSet born_forward(const SceneConfig& cfg,
                            GreensMode mode = GreensMode::Dyadic,
                            int threads = 1);

/// Multiple-scattering oracle: solves the self-consistent exciting-field
/// system per channel (scalar Green's coupling between point scatterers),
/// then propagates the scattered contributions to the receivers.  Throws
/// NumericError with a condition estimate if the coupling matrix is
/// near-singular.
MeasurementSet foldy_lax_forward(const SceneConfig& cfg,
                                 GreensMode mode = GreensMode::Dyadic,
                                 int threads = 1);

/// Adds circular complex white Gaussian noise per group, scaled so that
/// 10 log10(|y|^2/|n|^2) = snr_db exactly.  Deterministic given seed;
/// snr_db = +inf returns the input unchanged.
MeasurementSet add_noise(const MeasurementSet& data, double snr_db,
                         std::uint64_t seed);

/// Assembles the stacked A_(k) for one group (channels in the group's order).
CMat assemble_group_matrix(const SceneConfig& cfg,
                           const std::vector<ChannelId>& channels,
                           GreensMode mode = GreensMode::Dyadic,
                           int threads = 1);

/// Pairs every group's stacked matrix with its data: the (A_(k), y_(k))
/// systems the solver consumes.
std::vector<GroupSystem> build_group_systems(const SceneConfig& cfg,
                                             const MeasurementSet& data,
                                             GreensMode mode = GreensMode::Dyadic,
                                             int threads = 1);

}  // namespace gri
