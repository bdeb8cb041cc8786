#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "gri/em.hpp"
#include "gri/grid.hpp"
#include "gri/types.hpp"

namespace gri {

struct SensorArray {
  std::vector<Transmitter> transmitters;
  std::vector<Vec3> receivers;
  Axis rx_component = Axis::Z;
};

/// Uniform frequency sweep [f_min, f_max] with the given step.
struct FrequencyPlan {
  double f_min = 0.0;  // Hz
  double f_max = 0.0;
  double step = 0.0;

  int count() const;
  double frequency(int f) const { return f_min + f * step; }
  std::vector<double> frequencies() const;
};

/// One (frequency, transmitter) channel.
struct ChannelId {
  int f = 0;
  int t = 0;
  bool operator==(const ChannelId&) const = default;
  bool operator<(const ChannelId& o) const {
    return t != o.t ? t < o.t : f < o.f;
  }
};

enum class GroupingMode {
  PerTransmitter,
  SingleGroup,
  PerChannel,
  SubbandSubaperture,
};

struct GroupingParams {
  int subbands = 1;
  int subapertures = 1;
  double overlap = 0.5;
};

/// K channel-index sets; channels may belong to more than one group when
/// sub-bands/sub-apertures overlap.
struct GroupingScheme {
  GroupingMode mode = GroupingMode::PerTransmitter;
  GroupingParams params;
  std::vector<std::vector<ChannelId>> groups;  // each sorted by (t, f)

  int group_count() const { return static_cast<int>(groups.size()); }
};

GroupingMode parse_grouping_mode(const std::string& s);
std::string grouping_mode_name(GroupingMode m);

GroupingScheme build_groups(const FrequencyPlan& plan,
                            const SensorArray& array, GroupingMode mode,
                            const GroupingParams& params = {});

struct PointScatterer {
  Vec3 position = Vec3::Zero();
  cplx amplitude = 0.0;
};

/// Ground-truth scene: point scatterers plus the SSIM reference occupancy.
struct SceneSpec {
  std::vector<PointScatterer> scatterers;
  std::optional<RVec> reference;  // explicit reference volume, if given

  /// Reference occupancy: explicit volume if present, else scatterers
  /// rasterized to their nearest voxels as 1.0.
  RVec reference_volume(const ImagingGrid& grid) const;
};

struct NoiseSpec {
  double snr_db = std::numeric_limits<double>::infinity();
  std::uint64_t seed = 0;
};

struct SceneConfig {
  ImagingGrid grid;
  SensorArray array;
  FrequencyPlan frequencies;
  GroupingScheme grouping;
  SceneSpec scene;
  NoiseSpec noise;
  GreensMode greens_mode = GreensMode::Dyadic;
};

/// Parses and validates a JSON scene config.  Violations throw ConfigError
/// with a field-path diagnostic.
SceneConfig load_scene(const std::string& config_text);
SceneConfig load_scene_file(const std::string& path);

/// Canonical JSON serialization; load_scene(serialize_scene(c)) == c.
std::string serialize_scene(const SceneConfig& cfg);

/// FNV-1a content hash of the canonical serialization, as fixed-width hex.
std::string config_digest(const SceneConfig& cfg);
/// Digest over the system-defining sections only (grid, array, frequencies,
/// grouping) — everything that determines the measurement matrices.
std::string system_digest(const SceneConfig& cfg);

bool operator==(const SceneConfig& a, const SceneConfig& b);

}  // namespace gri
