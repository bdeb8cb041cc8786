// gri: microwave imaging pipeline driver.
//   gri simulate    — synthesize grouped measurement data for a scene config
//   gri reconstruct — back-projection / Born / grouped-reflectivity inversion
//   gri evaluate    — SSIM + residual report against a reference volume

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "gri/forward.hpp"
#include "gri/io.hpp"
#include "gri/metrics.hpp"
#include "gri/patchwise.hpp"
#include "gri/scene.hpp"
#include "gri/solver.hpp"
#include "gri/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitConfigError = 2;
constexpr int kExitNumericError = 3;
constexpr int kExitDigestMismatch = 4;

double now_seconds() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

struct CommonOpts {
  std::string config_path;
  std::string out_dir;
  int threads = 4;
};

json manifest_base(const std::string& subcommand, const gri::SceneConfig& cfg,
                   const std::vector<std::string>& argv_copy) {
  json m;
  m["tool_version"] = gri::kVersion;
  m["subcommand"] = subcommand;
  m["config_digest"] = gri::config_digest(cfg);
  m["system_digest"] = gri::system_digest(cfg);
  m["config"] = json::parse(gri::serialize_scene(cfg));
  m["argv"] = argv_copy;
  return m;
}

void write_manifest(const fs::path& dir, const json& m) {
  gri::write_text_file(dir / "manifest.json", m.dump(2) + "\n");
}

std::array<int, 3> parse_patches(const std::string& s) {
  std::array<int, 3> counts{1, 1, 1};
  if (std::sscanf(s.c_str(), "%dx%dx%d", &counts[0], &counts[1],
                  &counts[2]) != 3)
    throw gri::ConfigError("--patches", "expected AxBxC, got '" + s + "'");
  return counts;
}

int run_simulate(const CommonOpts& opts, const std::string& forward_model,
                 std::optional<double> snr_override,
                 std::optional<std::uint64_t> seed_override,
                 const std::vector<std::string>& argv_copy) {
  gri::SceneConfig cfg = gri::load_scene_file(opts.config_path);
  if (snr_override) cfg.noise.snr_db = *snr_override;
  if (seed_override) cfg.noise.seed = *seed_override;

  gri::MeasurementSet data;
  if (forward_model == "born")
    data = gri::born_forward(cfg, cfg.greens_mode, opts.threads);
  else if (forward_model == "foldy-lax")
    data = gri::foldy_lax_forward(cfg, cfg.greens_mode, opts.threads);
  else
    throw gri::ConfigError("--forward",
                           "expected foldy-lax or born, got '" +
                               forward_model + "'");
  data = gri::add_noise(data, cfg.noise.snr_db, cfg.noise.seed);

  const fs::path dir(opts.out_dir);
  fs::create_directories(dir);
  gri::write_measurements(dir / "measurements.grmeas", data,
                          gri::system_digest(cfg));
  gri::write_volume(dir / "reference.grvol",
                    gri::real_volume(cfg.grid.divisions(),
                                     cfg.scene.reference_volume(cfg.grid)));

  json m = manifest_base("simulate", cfg, argv_copy);
  m["seed"] = cfg.noise.seed;
  m["forward"] = forward_model;
  m["artifacts"] = {{"measurements", "measurements.grmeas"},
                    {"reference", "reference.grvol"}};
  write_manifest(dir, m);
  return 0;
}

gri::MeasurementSet regroup_single(const gri::MeasurementSet& data,
                                   gri::SceneConfig& cfg) {
  // Born reconstruction treats all channels as one coherent group.  Channels
  // duplicated by overlapping groups are taken from their first occurrence.
  const long s = data.receiver_count;
  gri::GroupingScheme single = gri::build_groups(
      cfg.frequencies, cfg.array, gri::GroupingMode::SingleGroup);
  gri::MeasurementSet out;
  out.receiver_count = data.receiver_count;
  gri::GroupMeasurement g;
  g.channels = single.groups[0];
  g.y.resize(s * static_cast<long>(g.channels.size()));
  long row = 0;
  for (const gri::ChannelId& c : g.channels) {
    bool found = false;
    for (const auto& src : data.groups) {
      for (std::size_t i = 0; i < src.channels.size(); ++i)
        if (src.channels[i] == c) {
          g.y.segment(row, s) = src.y.segment(static_cast<long>(i) * s, s);
          found = true;
          break;
        }
      if (found) break;
    }
    if (!found)
      throw gri::ConfigError("(data)", "channel missing from measurement set");
    row += s;
  }
  out.groups.push_back(std::move(g));
  cfg.grouping = std::move(single);
  return out;
}

int run_reconstruct(const CommonOpts& opts, const std::string& data_path,
                    const std::string& method, const std::string& p_name,
                    std::optional<double> gamma,
                    const std::optional<std::string>& patches, double overlap,
                    int max_iters, double tol,
                    const std::vector<std::string>& argv_copy) {
  gri::SceneConfig cfg = gri::load_scene_file(opts.config_path);
  gri::MeasurementSet data =
      gri::bind_measurements(gri::read_measurements(data_path), cfg);

  if (method == "born" && cfg.grouping.mode != gri::GroupingMode::SingleGroup)
    data = regroup_single(data, cfg);

  gri::SolverConfig solver_cfg;
  solver_cfg.gamma = gamma;
  solver_cfg.p = gri::parse_inner_norm(p_name);
  solver_cfg.max_iters = max_iters;
  solver_cfg.tol = tol;

  const fs::path dir(opts.out_dir);
  fs::create_directories(dir);

  const double t_total = now_seconds();
  const double t_assemble = now_seconds();
  std::vector<gri::GroupSystem> systems =
      gri::build_group_systems(cfg, data, cfg.greens_mode, opts.threads);
  const double assemble_seconds = now_seconds() - t_assemble;

  gri::CMat x;
  gri::TimingReport timing;
  timing.entries.push_back({"assemble", -1, assemble_seconds, 0});
  std::string history_csv;
  long iterations = 0;
  double gamma_used = 0.0;

  const bool fast = method == "gr-fast" || (method == "gr" && patches);
  if (method == "backprojection") {
    const double t0 = now_seconds();
    x = gri::back_project(systems);
    timing.entries.push_back({"solve", -1, now_seconds() - t0, 1});
    // Single-record history for the one adjoint pass.
    gri::ConvergenceHistory hist;
    gri::IterationRecord rec;
    rec.iteration = 1;
    double phi = 0.0;
    for (std::size_t k = 0; k < systems.size(); ++k) {
      const double r = (systems[k].y - systems[k].a * x.col(k)).norm();
      rec.residual_norms.push_back(r);
      phi += 0.5 * r * r;
    }
    rec.phi = phi;
    rec.omega = gri::mixed_norm(x, solver_cfg.p);
    rec.objective = phi;
    hist.records.push_back(rec);
    history_csv = hist.to_csv();
    iterations = 1;
  } else if (fast) {
    std::array<int, 3> counts{1, 1, 1};
    if (patches) counts = parse_patches(*patches);
    gri::PatchPartition probe =
        gri::partition_grid_by_counts(cfg.grid, counts, overlap);
    gri::FastReconstructResult result = gri::fast_reconstruct(
        systems, cfg.grid, probe.patch_dims, overlap, solver_cfg,
        opts.threads);
    x = std::move(result.x);
    for (auto& e : result.timing.entries) timing.entries.push_back(e);
    std::ostringstream hist;
    for (const auto& h : result.patch_histories) hist << h.to_csv();
    history_csv = hist.str();
    for (const auto& h : result.patch_histories)
      iterations += static_cast<long>(h.records.size());
    gamma_used = result.gamma_used;
  } else if (method == "gr" || method == "born") {
    const double t0 = now_seconds();
    gri::SolveResult result = gri::solve_first_order(systems, solver_cfg);
    x = std::move(result.x);
    iterations = static_cast<long>(result.history.records.size());
    timing.entries.push_back({"solve", -1, now_seconds() - t0, iterations});
    history_csv = result.history.to_csv();
    gamma_used = result.history.gamma_used;
  } else {
    throw gri::ConfigError("--method",
                           "expected backprojection, born, gr or gr-fast; "
                           "got '" + method + "'");
  }
  const double total_seconds = now_seconds() - t_total;

  double residual_sq = 0.0;
  for (std::size_t k = 0; k < systems.size(); ++k)
    residual_sq += (systems[k].y - systems[k].a * x.col(k)).squaredNorm();
  const double residual = std::sqrt(residual_sq);

  gri::Volume vol{cfg.grid.divisions(), x};
  gri::write_volume(dir / "volume.grvol", vol);
  gri::write_volume(dir / "composite.grvol",
                    gri::real_volume(cfg.grid.divisions(),
                                     gri::composite_image(x)));
  gri::write_text_file(dir / "history.csv", history_csv);
  gri::write_text_file(dir / "timing.csv", timing.to_csv());

  json m = manifest_base("reconstruct", cfg, argv_copy);
  m["method"] = method;
  m["p"] = p_name;
  m["gamma_used"] = gamma_used;
  m["data"] = data_path;
  m["report"] = {{"method", method},
                 {"residual", residual},
                 {"iterations", iterations},
                 {"seconds", total_seconds}};
  m["artifacts"] = {{"volume", "volume.grvol"},
                    {"composite", "composite.grvol"},
                    {"history", "history.csv"},
                    {"timing", "timing.csv"}};
  write_manifest(dir, m);
  return 0;
}

int run_evaluate(const std::string& volume_path,
                 const std::string& reference_path, const std::string& out_dir,
                 const std::optional<std::string>& slice_axis,
                 int slice_index,
                 const std::vector<std::string>& argv_copy) {
  const gri::Volume vol = gri::read_volume(volume_path);
  const gri::Volume ref = gri::read_volume(reference_path);
  if (vol.dims != ref.dims)
    throw gri::ConfigError("(volumes)",
                           "volume and reference grids do not match");

  const gri::RVec img = gri::composite_image(vol.data);
  const gri::RVec ref_img = gri::composite_image(ref.data);

  gri::SsimParams params;
  params.dynamic_range = ref_img.size() > 0 && ref_img.maxCoeff() > 0.0
                             ? ref_img.maxCoeff()
                             : 1.0;
  const double score = gri::ssim(img, ref_img, vol.dims, params);

  // Residual/iteration metadata comes from the reconstruction manifest
  // sitting next to the volume, when there is one.
  std::string method = "volume";
  double residual = 0.0;
  long iterations = 0;
  double seconds = 0.0;
  const fs::path sidecar = fs::path(volume_path).parent_path() / "manifest.json";
  if (fs::exists(sidecar)) {
    try {
      const json m = json::parse(gri::read_text_file(sidecar));
      if (m.contains("report")) {
        const json& r = m["report"];
        method = r.value("method", method);
        residual = r.value("residual", residual);
        iterations = r.value("iterations", iterations);
        seconds = r.value("seconds", seconds);
      }
    } catch (...) {
      // Not a reconstruction output; report SSIM only.
    }
  }

  const fs::path dir(out_dir);
  fs::create_directories(dir);
  std::ostringstream report;
  report.precision(17);
  report << "method,ssim,residual,iterations,seconds\n"
         << method << ',' << score << ',' << residual << ',' << iterations
         << ',' << seconds << '\n';
  gri::write_text_file(dir / "report.csv", report.str());

  if (slice_axis) {
    const gri::Axis axis = gri::parse_axis(*slice_axis);
    const auto& d = vol.dims;
    const auto at = [&](int x, int y, int z) {
      return img[x + static_cast<long>(d[0]) *
                         (y + static_cast<long>(d[1]) * z)];
    };
    std::ostringstream slice;
    slice.precision(17);
    const int a = static_cast<int>(axis);
    if (slice_index < 0 || slice_index >= d[a])
      throw gri::ConfigError("--slice-index", "out of range");
    if (axis == gri::Axis::Z) {
      for (int y = 0; y < d[1]; ++y)
        for (int x = 0; x < d[0]; ++x)
          slice << x << ',' << y << ',' << at(x, y, slice_index) << '\n';
    } else if (axis == gri::Axis::Y) {
      for (int z = 0; z < d[2]; ++z)
        for (int x = 0; x < d[0]; ++x)
          slice << x << ',' << z << ',' << at(x, slice_index, z) << '\n';
    } else {
      for (int z = 0; z < d[2]; ++z)
        for (int y = 0; y < d[1]; ++y)
          slice << y << ',' << z << ',' << at(slice_index, y, z) << '\n';
    }
    gri::write_text_file(dir / "slice.csv", slice.str());
  }

  json m;
  m["tool_version"] = gri::kVersion;
  m["subcommand"] = "evaluate";
  m["argv"] = argv_copy;
  m["volume"] = volume_path;
  m["reference"] = reference_path;
  m["ssim"] = score;
  m["artifacts"] = {{"report", "report.csv"}};
  write_manifest(dir, m);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> argv_copy(argv, argv + argc);

  CLI::App app{"Generalized-reflectivity microwave imaging toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", gri::kVersion);

  CommonOpts opts;
  std::string forward_model = "foldy-lax";
  std::optional<double> snr_override;
  std::optional<std::uint64_t> seed_override;

  auto* sim = app.add_subcommand("simulate", "Generate synthetic measurements");
  sim->add_option("--config", opts.config_path, "Scene config (JSON)")
      ->required();
  sim->add_option("--out", opts.out_dir, "Output directory")->required();
  sim->add_option("--forward", forward_model, "foldy-lax | born");
  sim->add_option("--snr", snr_override, "SNR in dB (overrides config)");
  sim->add_option("--seed", seed_override, "Noise seed (overrides config)");
  sim->add_option("--threads", opts.threads, "Worker threads");

  std::string data_path, method = "gr", p_name = "2";
  std::optional<double> gamma;
  std::optional<std::string> patches;
  double overlap = 0.5, tol = 1e-4;
  int max_iters = 200;

  auto* rec = app.add_subcommand("reconstruct", "Invert measurement data");
  rec->add_option("--config", opts.config_path, "Scene config (JSON)")
      ->required();
  rec->add_option("--data", data_path, "Measurement file")->required();
  rec->add_option("--out", opts.out_dir, "Output directory")->required();
  rec->add_option("--method", method,
                  "backprojection | born | gr | gr-fast");
  rec->add_option("--p", p_name, "Inner mixed-norm exponent: 1 | 2 | inf");
  rec->add_option("--gamma", gamma, "Regularization weight");
  rec->add_option("--patches", patches, "Patch counts per axis, AxBxC");
  rec->add_option("--overlap", overlap, "Patch overlap fraction [0,1)");
  rec->add_option("--max-iters", max_iters, "Iteration cap");
  rec->add_option("--tol", tol, "Relative objective-change stop threshold");
  rec->add_option("--threads", opts.threads, "Worker threads");
  rec->add_option("--seed", seed_override, "Unused; accepted for symmetry");

  std::string volume_path, reference_path;
  std::optional<std::string> slice_axis;
  int slice_index = 0;

  auto* eva = app.add_subcommand("evaluate", "Score a volume against a reference");
  eva->add_option("--volume", volume_path, "Volume to score")->required();
  eva->add_option("--reference", reference_path, "Reference volume")
      ->required();
  eva->add_option("--out", opts.out_dir, "Output directory")->required();
  eva->add_option("--slice-axis", slice_axis, "Optional slice export axis");
  eva->add_option("--slice-index", slice_index, "Slice index");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed())
      return run_simulate(opts, forward_model, snr_override, seed_override,
                          argv_copy);
    if (rec->parsed())
      return run_reconstruct(opts, data_path, method, p_name, gamma, patches,
                             overlap, max_iters, tol, argv_copy);
    return run_evaluate(volume_path, reference_path, opts.out_dir, slice_axis,
                        slice_index, argv_copy);
  } catch (const gri::DigestMismatchError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDigestMismatch;
  } catch (const gri::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const gri::NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return kExitNumericError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
