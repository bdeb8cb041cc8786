#include "gri/forward.hpp"

#include <cmath>
#include <random>

#include "parallel.hpp"

namespace gri {

namespace {

// Per-channel data for every (f, t); the grouped vectors stack from these.
std::vector<CVec> channel_data(const SceneConfig& cfg, GreensMode mode,
                               int threads, bool multiple_scattering) {
  const int f_count = cfg.frequencies.count();
  const int t_count = static_cast<int>(cfg.array.transmitters.size());
  const long s_count = static_cast<long>(cfg.array.receivers.size());
  const auto& scatterers = cfg.scene.scatterers;
  const long m_count = static_cast<long>(scatterers.size());

  std::vector<Vec3> points(m_count);
  CVec amplitudes(m_count);
  for (long m = 0; m < m_count; ++m) {
    points[m] = scatterers[m].position;
    amplitudes[m] = scatterers[m].amplitude;
  }

  std::vector<CVec> data(static_cast<std::size_t>(f_count) * t_count);
  parallel_for(f_count * t_count, threads, [&](long c) {
    const int f = static_cast<int>(c % f_count);
    const int t = static_cast<int>(c / f_count);
    if (m_count == 0) {
      data[c] = CVec::Zero(s_count);
      return;
    }
    const Wavenumber k =
        Wavenumber::from_frequency(cfg.frequencies.frequency(f));
    const Transmitter& tx = cfg.array.transmitters[t];

    std::vector<CVec3> fields(m_count);
    for (long m = 0; m < m_count; ++m)
      fields[m] =
          incident_field(points[m], tx.position, tx.polarization, k, mode);

    if (multiple_scattering && m_count > 1) {
      // Self-consistent exciting fields: (I - C) E = E_in with scalar
      // Green's coupling C(m, m') = a_m' g(p_m, p_m').
      CMat coupling = CMat::Zero(m_count, m_count);
      for (long m = 0; m < m_count; ++m)
        for (long mm = 0; mm < m_count; ++mm)
          if (m != mm)
            coupling(m, mm) =
                amplitudes[mm] * scalar_green(points[m], points[mm], k);
      const CMat system = CMat::Identity(m_count, m_count) - coupling;

      Eigen::JacobiSVD<CMat> svd(system);
      const double smin = svd.singularValues()(m_count - 1);
      const double smax = svd.singularValues()(0);
      if (smin <= 0.0 || smax / smin > 1e12)
        throw NumericError(
            "foldy_lax_forward: near-singular coupling matrix, condition "
            "estimate " +
            std::to_string(smin > 0.0 ? smax / smin
                                      : std::numeric_limits<double>::infinity()));

      CMat rhs(m_count, 3);
      for (long m = 0; m < m_count; ++m) rhs.row(m) = fields[m].transpose();
      const CMat exciting = system.partialPivLu().solve(rhs);
      for (long m = 0; m < m_count; ++m)
        fields[m] = exciting.row(m).transpose();
    }

    const CMat receive =
        radiated_matrix(points, fields, cfg.grid.voxel_volume(),
                        cfg.array.receivers, k, cfg.array.rx_component, mode);
    data[c] = receive * amplitudes;
  });
  return data;
}

MeasurementSet stack_groups(const SceneConfig& cfg,
                            const std::vector<CVec>& per_channel) {
  const int f_count = cfg.frequencies.count();
  const long s_count = static_cast<long>(cfg.array.receivers.size());
  MeasurementSet set;
  set.receiver_count = static_cast<int>(s_count);
  for (const auto& channels : cfg.grouping.groups) {
    GroupMeasurement g;
    g.channels = channels;
    g.y.resize(s_count * static_cast<long>(channels.size()));
    long row = 0;
    for (const ChannelId& c : channels) {
      g.y.segment(row, s_count) =
          per_channel[static_cast<std::size_t>(c.t) * f_count + c.f];
      row += s_count;
    }
    set.groups.push_back(std::move(g));
  }
  return set;
}

}  // namespace

MeasurementSet born_forward(const SceneConfig& cfg, GreensMode mode,
                            int threads) {
  return stack_groups(cfg, channel_data(cfg, mode, threads, false));
}

MeasurementSet foldy_lax_forward(const SceneConfig& cfg, GreensMode mode,
                                 int threads) {
  return stack_groups(cfg, channel_data(cfg, mode, threads, true));
}

MeasurementSet add_noise(const MeasurementSet& data, double snr_db,
                         std::uint64_t seed) {
  if (std::isinf(snr_db) && snr_db > 0.0) return data;
  if (!std::isfinite(snr_db))
    throw std::invalid_argument("add_noise: snr_db must be finite or +inf");

  MeasurementSet noisy = data;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (std::size_t k = 0; k < noisy.groups.size(); ++k) {
    CVec& y = noisy.groups[k].y;
    const double y_norm = y.norm();
    if (y_norm == 0.0)
      throw std::invalid_argument(
          "add_noise: group " + std::to_string(k) +
          " has zero signal; SNR undefined");
    CVec n(y.size());
    for (long i = 0; i < n.size(); ++i) n[i] = cplx(gauss(rng), gauss(rng));
    // Rescale so the per-group power ratio is exact.
    n *= y_norm / n.norm() * std::pow(10.0, -snr_db / 20.0);
    y += n;
  }
  return noisy;
}

CMat assemble_group_matrix(const SceneConfig& cfg,
                           const std::vector<ChannelId>& channels,
                           GreensMode mode, int threads) {
  const long s_count = static_cast<long>(cfg.array.receivers.size());
  const long n_count = cfg.grid.voxel_count();
  CMat a(s_count * static_cast<long>(channels.size()), n_count);
  long row = 0;
  for (const ChannelId& c : channels) {
    const Wavenumber k =
        Wavenumber::from_frequency(cfg.frequencies.frequency(c.f));
    a.middleRows(row, s_count) =
        assemble_measurement_matrix(cfg.grid, cfg.array.receivers,
                                    cfg.array.transmitters[c.t], k,
                                    cfg.array.rx_component, mode, threads)
            .entries;
    row += s_count;
  }
  return a;
}

std::vector<GroupSystem> build_group_systems(const SceneConfig& cfg,
                                             const MeasurementSet& data,
                                             GreensMode mode, int threads) {
  if (data.group_count() != cfg.grouping.group_count())
    throw std::invalid_argument("build_group_systems: group count mismatch");
  std::vector<GroupSystem> systems;
  systems.reserve(data.groups.size());
  for (const auto& g : data.groups) {
    GroupSystem sys;
    sys.a = assemble_group_matrix(cfg, g.channels, mode, threads);
    sys.y = g.y;
    if (sys.y.size() != sys.a.rows())
      throw std::invalid_argument("build_group_systems: row mismatch");
    systems.push_back(std::move(sys));
  }
  return systems;
}

}  // namespace gri
