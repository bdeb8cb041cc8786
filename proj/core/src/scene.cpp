#include "gri/scene.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace gri {

using nlohmann::json;

int FrequencyPlan::count() const {
  if (!(step > 0.0)) throw ConfigError("frequencies.step", "must be > 0");
  if (f_min > f_max)
    throw ConfigError("frequencies", "f_min exceeds f_max (empty list)");
  return static_cast<int>(std::floor((f_max - f_min) / step + 1e-9)) + 1;
}

std::vector<double> FrequencyPlan::frequencies() const {
  std::vector<double> out;
  const int f_count = count();
  out.reserve(f_count);
  for (int f = 0; f < f_count; ++f) out.push_back(frequency(f));
  return out;
}

GroupingMode parse_grouping_mode(const std::string& s) {
  if (s == "per-transmitter") return GroupingMode::PerTransmitter;
  if (s == "single-group") return GroupingMode::SingleGroup;
  if (s == "per-channel") return GroupingMode::PerChannel;
  if (s == "subband-subaperture") return GroupingMode::SubbandSubaperture;
  throw ConfigError("grouping.mode", "unknown mode '" + s + "'");
}

std::string grouping_mode_name(GroupingMode m) {
  switch (m) {
    case GroupingMode::PerTransmitter: return "per-transmitter";
    case GroupingMode::SingleGroup: return "single-group";
    case GroupingMode::PerChannel: return "per-channel";
    default: return "subband-subaperture";
  }
}

namespace {

// Overlapping index windows: `count` windows of equal width covering [0, len).
std::vector<std::pair<int, int>> make_windows(int len, int count,
                                              double overlap,
                                              const std::string& path) {
  if (count < 1 || count > len)
    throw ConfigError(path, "window count must be in [1, " +
                                std::to_string(len) + "]");
  if (count == 1) return {{0, len}};
  const double denom = count - (count - 1) * overlap;
  int width = static_cast<int>(std::ceil(len / denom));
  width = std::clamp(width, 1, len);
  std::vector<std::pair<int, int>> windows;
  for (int i = 0; i < count; ++i) {
    const double s = static_cast<double>(i) * (len - width) / (count - 1);
    windows.emplace_back(static_cast<int>(std::lround(s)), width);
  }
  for (std::size_t i = 1; i < windows.size(); ++i)
    if (windows[i].first > windows[i - 1].first + width)
      throw ConfigError(path, "windows leave uncovered channels");
  return windows;
}

}  // namespace

GroupingScheme build_groups(const FrequencyPlan& plan,
                            const SensorArray& array, GroupingMode mode,
                            const GroupingParams& params) {
  const int f_count = plan.count();
  const int t_count = static_cast<int>(array.transmitters.size());
  if (t_count < 1) throw ConfigError("array.transmitters", "need at least one");

  GroupingScheme scheme;
  scheme.mode = mode;
  scheme.params = params;
  switch (mode) {
    case GroupingMode::PerTransmitter:
      for (int t = 0; t < t_count; ++t) {
        std::vector<ChannelId> g;
        for (int f = 0; f < f_count; ++f) g.push_back({f, t});
        scheme.groups.push_back(std::move(g));
      }
      break;
    case GroupingMode::SingleGroup: {
      std::vector<ChannelId> g;
      for (int t = 0; t < t_count; ++t)
        for (int f = 0; f < f_count; ++f) g.push_back({f, t});
      scheme.groups.push_back(std::move(g));
      break;
    }
    case GroupingMode::PerChannel:
      for (int t = 0; t < t_count; ++t)
        for (int f = 0; f < f_count; ++f)
          scheme.groups.push_back({ChannelId{f, t}});
      break;
    case GroupingMode::SubbandSubaperture: {
      if (!(params.overlap >= 0.0 && params.overlap < 1.0))
        throw ConfigError("grouping.params.overlap", "must be in [0, 1)");
      const auto bands = make_windows(f_count, params.subbands, params.overlap,
                                      "grouping.params.subbands");
      const auto apertures =
          make_windows(t_count, params.subapertures, params.overlap,
                       "grouping.params.subapertures");
      for (const auto& ap : apertures)
        for (const auto& band : bands) {
          std::vector<ChannelId> g;
          for (int t = ap.first; t < ap.first + ap.second; ++t)
            for (int f = band.first; f < band.first + band.second; ++f)
              g.push_back({f, t});
          scheme.groups.push_back(std::move(g));
        }
      break;
    }
  }
  for (const auto& g : scheme.groups)
    if (g.empty()) throw ConfigError("grouping", "empty channel group");
  return scheme;
}

RVec SceneSpec::reference_volume(const ImagingGrid& grid) const {
  if (reference) {
    if (reference->size() != grid.voxel_count())
      throw ConfigError("scene.reference",
                        "length must equal the grid voxel count");
    return *reference;
  }
  RVec vol = RVec::Zero(grid.voxel_count());
  for (const auto& s : scatterers) vol[grid.nearest_voxel(s.position)] = 1.0;
  return vol;
}

namespace {

Vec3 parse_vec3(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 3)
    throw ConfigError(path, "expected an array of 3 numbers");
  Vec3 v;
  for (int i = 0; i < 3; ++i) {
    if (!j[i].is_number())
      throw ConfigError(path + "[" + std::to_string(i) + "]",
                        "expected a number");
    v[i] = j[i].get<double>();
  }
  return v;
}

std::array<int, 3> parse_div3(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 3)
    throw ConfigError(path, "expected an array of 3 integers");
  std::array<int, 3> v{};
  for (int i = 0; i < 3; ++i) {
    if (!j[i].is_number_integer())
      throw ConfigError(path + "[" + std::to_string(i) + "]",
                        "expected an integer");
    v[i] = j[i].get<int>();
  }
  return v;
}

const json& require(const json& j, const char* key, const std::string& path) {
  auto it = j.find(key);
  if (it == j.end()) throw ConfigError(path + "." + key, "missing field");
  return *it;
}

cplx parse_amplitude(const json& j, const std::string& path) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return {j[0].get<double>(), j[1].get<double>()};
  throw ConfigError(path, "expected a number or [re, im]");
}

}  // namespace

SceneConfig load_scene(const std::string& config_text) {
  json root;
  try {
    root = json::parse(config_text);
  } catch (const json::parse_error& e) {
    throw ConfigError("(root)", std::string("invalid JSON: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("(root)", "expected a JSON object");

  SceneConfig cfg;

  const json& jgrid = require(root, "grid", "(root)");
  const Vec3 grid_center =
      parse_vec3(require(jgrid, "center", "grid"), "grid.center");
  const Vec3 grid_extents =
      parse_vec3(require(jgrid, "extents", "grid"), "grid.extents");
  const std::array<int, 3> grid_div =
      parse_div3(require(jgrid, "divisions", "grid"), "grid.divisions");
  cfg.grid = ImagingGrid(grid_center, grid_extents, grid_div);

  const json& jarr = require(root, "array", "(root)");
  const json& jtx = require(jarr, "transmitters", "array");
  if (!jtx.is_array() || jtx.empty())
    throw ConfigError("array.transmitters", "need a non-empty array");
  for (std::size_t i = 0; i < jtx.size(); ++i) {
    const std::string path = "array.transmitters[" + std::to_string(i) + "]";
    Transmitter t;
    t.position = parse_vec3(require(jtx[i], "position", path),
                            path + ".position");
    if (jtx[i].contains("polarization"))
      t.polarization = parse_vec3(jtx[i]["polarization"],
                                  path + ".polarization");
    const double norm = t.polarization.norm();
    if (norm == 0.0) throw ConfigError(path + ".polarization", "zero vector");
    t.polarization /= norm;
    cfg.array.transmitters.push_back(t);
  }
  const json& jrx = require(jarr, "receivers", "array");
  if (!jrx.is_array() || jrx.empty())
    throw ConfigError("array.receivers", "need a non-empty array");
  for (std::size_t i = 0; i < jrx.size(); ++i) {
    const std::string path = "array.receivers[" + std::to_string(i) + "]";
    cfg.array.receivers.push_back(
        parse_vec3(require(jrx[i], "position", path), path + ".position"));
  }
  cfg.array.rx_component =
      jarr.contains("rx_component")
          ? parse_axis(jarr["rx_component"].get<std::string>())
          : Axis::Z;

  const double clearance = cfg.grid.voxel_diagonal();
  for (std::size_t i = 0; i < cfg.array.transmitters.size(); ++i)
    if (cfg.grid.distance_to_box(cfg.array.transmitters[i].position) <
        clearance)
      throw ConfigError("array.transmitters[" + std::to_string(i) +
                            "].position",
                        "inside or within one voxel diagonal of the grid");
  for (std::size_t i = 0; i < cfg.array.receivers.size(); ++i)
    if (cfg.grid.distance_to_box(cfg.array.receivers[i]) < clearance)
      throw ConfigError("array.receivers[" + std::to_string(i) + "].position",
                        "inside or within one voxel diagonal of the grid");

  const json& jfreq = require(root, "frequencies", "(root)");
  cfg.frequencies.f_min = require(jfreq, "f_min", "frequencies").get<double>();
  cfg.frequencies.f_max = require(jfreq, "f_max", "frequencies").get<double>();
  cfg.frequencies.step = require(jfreq, "step", "frequencies").get<double>();
  if (!(cfg.frequencies.f_min > 0.0))
    throw ConfigError("frequencies.f_min", "must be > 0");
  cfg.frequencies.count();  // validates step and ordering

  GroupingMode mode = GroupingMode::PerTransmitter;
  GroupingParams params;
  if (root.contains("grouping")) {
    const json& jg = root["grouping"];
    mode = parse_grouping_mode(require(jg, "mode", "grouping")
                                   .get<std::string>());
    if (jg.contains("params")) {
      const json& jp = jg["params"];
      if (jp.contains("subbands")) params.subbands = jp["subbands"].get<int>();
      if (jp.contains("subapertures"))
        params.subapertures = jp["subapertures"].get<int>();
      if (jp.contains("overlap")) params.overlap = jp["overlap"].get<double>();
    }
  }
  cfg.grouping = build_groups(cfg.frequencies, cfg.array, mode, params);

  if (root.contains("scene")) {
    const json& js = root["scene"];
    if (js.contains("scatterers")) {
      const json& jsc = js["scatterers"];
      if (!jsc.is_array())
        throw ConfigError("scene.scatterers", "expected an array");
      for (std::size_t i = 0; i < jsc.size(); ++i) {
        const std::string path = "scene.scatterers[" + std::to_string(i) + "]";
        PointScatterer s;
        s.position = parse_vec3(require(jsc[i], "position", path),
                                path + ".position");
        s.amplitude = parse_amplitude(require(jsc[i], "amplitude", path),
                                      path + ".amplitude");
        if (!cfg.grid.contains(s.position))
          throw ConfigError(path + ".position", "outside the grid box");
        cfg.scene.scatterers.push_back(s);
      }
    }
    if (js.contains("reference") && !js["reference"].is_null()) {
      const json& jr = js["reference"];
      if (!jr.is_array())
        throw ConfigError("scene.reference", "expected an array or null");
      if (static_cast<long>(jr.size()) != cfg.grid.voxel_count())
        throw ConfigError("scene.reference",
                          "length must equal the grid voxel count");
      RVec ref(jr.size());
      for (std::size_t i = 0; i < jr.size(); ++i) {
        ref[i] = jr[i].get<double>();
        if (ref[i] < 0.0)
          throw ConfigError("scene.reference[" + std::to_string(i) + "]",
                            "must be non-negative");
      }
      cfg.scene.reference = std::move(ref);
    }
  }

  if (root.contains("noise")) {
    const json& jn = root["noise"];
    if (jn.contains("snr_db") && !jn["snr_db"].is_null()) {
      if (jn["snr_db"].is_string()) {
        if (jn["snr_db"].get<std::string>() != "inf")
          throw ConfigError("noise.snr_db", "expected a number or \"inf\"");
      } else {
        cfg.noise.snr_db = jn["snr_db"].get<double>();
      }
    }
    if (jn.contains("seed")) cfg.noise.seed = jn["seed"].get<std::uint64_t>();
  }

  if (root.contains("greens")) {
    const std::string g = root["greens"].get<std::string>();
    if (g == "scalar")
      cfg.greens_mode = GreensMode::Scalar;
    else if (g == "dyadic")
      cfg.greens_mode = GreensMode::Dyadic;
    else
      throw ConfigError("greens", "expected 'dyadic' or 'scalar'");
  }

  return cfg;
}

SceneConfig load_scene_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("(config)", "cannot read '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_scene(buf.str());
}

namespace {

json vec3_json(const Vec3& v) { return json::array({v[0], v[1], v[2]}); }

json system_sections(const SceneConfig& cfg) {
  json root;
  root["grid"]["center"] = vec3_json(cfg.grid.center());
  root["grid"]["extents"] = vec3_json(cfg.grid.extents());
  root["grid"]["divisions"] = cfg.grid.divisions();
  json txs = json::array();
  for (const auto& t : cfg.array.transmitters)
    txs.push_back({{"position", vec3_json(t.position)},
                   {"polarization", vec3_json(t.polarization)}});
  root["array"]["transmitters"] = txs;
  json rxs = json::array();
  for (const auto& r : cfg.array.receivers)
    rxs.push_back({{"position", vec3_json(r)}});
  root["array"]["receivers"] = rxs;
  root["array"]["rx_component"] = axis_name(cfg.array.rx_component);
  root["frequencies"] = {{"f_min", cfg.frequencies.f_min},
                         {"f_max", cfg.frequencies.f_max},
                         {"step", cfg.frequencies.step}};
  root["grouping"] = {{"mode", grouping_mode_name(cfg.grouping.mode)},
                      {"params",
                       {{"subbands", cfg.grouping.params.subbands},
                        {"subapertures", cfg.grouping.params.subapertures},
                        {"overlap", cfg.grouping.params.overlap}}}};
  root["greens"] =
      cfg.greens_mode == GreensMode::Scalar ? "scalar" : "dyadic";
  return root;
}

}  // namespace

std::string serialize_scene(const SceneConfig& cfg) {
  json root = system_sections(cfg);
  json scatterers = json::array();
  for (const auto& s : cfg.scene.scatterers)
    scatterers.push_back(
        {{"position", vec3_json(s.position)},
         {"amplitude", json::array({s.amplitude.real(), s.amplitude.imag()})}});
  root["scene"]["scatterers"] = scatterers;
  if (cfg.scene.reference) {
    json ref = json::array();
    for (long i = 0; i < cfg.scene.reference->size(); ++i)
      ref.push_back((*cfg.scene.reference)[i]);
    root["scene"]["reference"] = ref;
  } else {
    root["scene"]["reference"] = nullptr;
  }
  if (std::isfinite(cfg.noise.snr_db))
    root["noise"]["snr_db"] = cfg.noise.snr_db;
  else
    root["noise"]["snr_db"] = nullptr;
  root["noise"]["seed"] = cfg.noise.seed;
  return root.dump();
}

namespace {

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace

std::string config_digest(const SceneConfig& cfg) {
  return fnv1a_hex(serialize_scene(cfg));
}

std::string system_digest(const SceneConfig& cfg) {
  return fnv1a_hex(system_sections(cfg).dump());
}

bool operator==(const SceneConfig& a, const SceneConfig& b) {
  return serialize_scene(a) == serialize_scene(b) &&
         a.grouping.groups == b.grouping.groups;
}

}  // namespace gri
