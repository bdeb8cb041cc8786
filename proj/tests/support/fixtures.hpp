#pragma once

// Shared test scenes: the canonical four-transmitter MIMO geometry at full
// scale (config parsing) and at desk scale (solver/imaging tests).

#include <string>

#include "gri/scene.hpp"

namespace gri::testref {

/// Canonical full-scale config: 4 transmitters, 9x8 receiver array,
/// 0.5-3.5 GHz in 26 MHz steps, 40x16x20 grid of 5 cm voxels.
inline std::string canonical_config_json() {
  std::string rx;
  for (int j = 0; j < 8; ++j)
    for (int i = 0; i < 9; ++i) {
      if (!rx.empty()) rx += ",";
      rx += "{\"position\": [" + std::to_string(-0.6 + 0.15 * i) + ", 0, " +
            std::to_string(0.1 * j) + "]}";
    }
  return R"({
  "grid": {"center": [0, -0.6, 0.5], "extents": [2.0, 0.8, 1.0], "divisions": [40, 16, 20]},
  "array": {
    "transmitters": [
      {"position": [-0.61, 0, 0]}, {"position": [0.61, 0, 0]},
      {"position": [-0.61, 0, 0.7]}, {"position": [0.61, 0, 0.7]}
    ],
    "receivers": [)" +
         rx + R"(],
    "rx_component": "z"
  },
  "frequencies": {"f_min": 0.5e9, "f_max": 3.5e9, "step": 26e6},
  "grouping": {"mode": "per-transmitter"},
  "scene": {"scatterers": [
    {"position": [0.047, -0.6, 0.25], "amplitude": 0.1}
  ]},
  "noise": {"snr_db": 30, "seed": 1}
})";
}

/// Desk-scale variant of the same geometry: 20x8x10 grid, 24 receivers,
/// 8 frequencies, three crossed bars of point scatterers joined at a corner.
inline SceneConfig desk_config(double amplitude = 0.15,
                               double snr_db = 30.0, std::uint64_t seed = 1,
                               GroupingMode mode = GroupingMode::PerTransmitter) {
  SceneConfig cfg;
  cfg.grid = ImagingGrid({0.0, -0.6, 0.5}, {1.0, 0.4, 0.5}, {20, 8, 10});

  cfg.array.transmitters = {
      {{-0.55, 0.0, 0.0}, Vec3::UnitZ()},
      {{0.55, 0.0, 0.0}, Vec3::UnitZ()},
      {{-0.55, 0.0, 0.7}, Vec3::UnitZ()},
      {{0.55, 0.0, 0.7}, Vec3::UnitZ()},
  };
  for (int j = 0; j < 4; ++j)
    for (int i = 0; i < 6; ++i)
      cfg.array.receivers.push_back(
          {-0.5 + 0.2 * i, 0.0, 0.2 + 0.15 * j});
  cfg.array.rx_component = Axis::Z;

  cfg.frequencies = {0.5e9, 3.5e9, 3.0e9 / 7.0};  // 8 frequencies

  const Vec3 corner(0.03, -0.62, 0.47);
  for (int i = 0; i < 5; ++i)
    cfg.scene.scatterers.push_back(
        {corner + Vec3(0.08 * (i + 1), 0.0, 0.0), amplitude});
  for (int j = 0; j < 3; ++j)
    cfg.scene.scatterers.push_back(
        {corner + Vec3(0.0, 0.055 * (j + 1), 0.0), amplitude});
  for (int l = 0; l < 4; ++l)
    cfg.scene.scatterers.push_back(
        {corner + Vec3(0.0, 0.0, 0.06 * (l + 1)), amplitude});

  cfg.noise.snr_db = snr_db;
  cfg.noise.seed = seed;
  cfg.grouping = build_groups(cfg.frequencies, cfg.array, mode);
  return cfg;
}

/// Small config for fast end-to-end runs: 10x4x5 grid, 6 receivers,
/// 3 frequencies, 2 transmitters.
inline SceneConfig tiny_config(double amplitude = 0.1,
                               double snr_db = std::numeric_limits<double>::infinity(),
                               std::uint64_t seed = 0) {
  SceneConfig cfg;
  cfg.grid = ImagingGrid({0.0, -0.6, 0.5}, {1.0, 0.4, 0.5}, {10, 4, 5});
  cfg.array.transmitters = {
      {{-0.55, 0.0, 0.0}, Vec3::UnitZ()},
      {{0.55, 0.0, 0.0}, Vec3::UnitZ()},
  };
  for (int i = 0; i < 3; ++i) {
    cfg.array.receivers.push_back({-0.3 + 0.3 * i, 0.0, 0.1});
    cfg.array.receivers.push_back({-0.3 + 0.3 * i, 0.0, 0.4});
  }
  cfg.frequencies = {1.0e9, 2.0e9, 0.5e9};  // 3 frequencies
  cfg.scene.scatterers = {
      {{0.025, -0.625, 0.475}, amplitude},
      {{0.225, -0.625, 0.475}, amplitude},
  };
  cfg.noise.snr_db = snr_db;
  cfg.noise.seed = seed;
  cfg.grouping = build_groups(cfg.frequencies, cfg.array,
                              GroupingMode::PerTransmitter);
  return cfg;
}

}  // namespace gri::testref
