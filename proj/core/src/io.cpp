#include "gri/io.hpp"

#include <bit>
#include <cstdint>
#include <fstream>
#include <sstream>

namespace gri {

static_assert(std::endian::native == std::endian::little,
              "file formats assume a little-endian host");

namespace {

constexpr std::size_t kVolumeHeaderSize = 64;

void write_complex64(std::ostream& out, const cplx& v) {
  const float re = static_cast<float>(v.real());
  const float im = static_cast<float>(v.imag());
  out.write(reinterpret_cast<const char*>(&re), sizeof(float));
  out.write(reinterpret_cast<const char*>(&im), sizeof(float));
}

cplx read_complex64(std::istream& in) {
  float re = 0.0f, im = 0.0f;
  in.read(reinterpret_cast<char*>(&re), sizeof(float));
  in.read(reinterpret_cast<char*>(&im), sizeof(float));
  return {re, im};
}

[[noreturn]] void bad_file(const std::filesystem::path& path,
                           const std::string& why) {
  throw ConfigError("(file)", path.string() + ": " + why);
}

}  // namespace

void write_volume(const std::filesystem::path& path, const Volume& volume) {
  const long n = static_cast<long>(volume.dims[0]) * volume.dims[1] *
                 volume.dims[2];
  if (volume.data.rows() != n)
    throw std::invalid_argument("write_volume: data rows do not match dims");
  std::ofstream out(path, std::ios::binary);
  if (!out) bad_file(path, "cannot open for writing");

  std::string header = "GRVOL1 " + std::to_string(volume.dims[0]) + " " +
                       std::to_string(volume.dims[1]) + " " +
                       std::to_string(volume.dims[2]) + " " +
                       std::to_string(volume.data.cols()) + " c64";
  if (header.size() > kVolumeHeaderSize - 1)
    throw std::invalid_argument("write_volume: header overflow");
  header.resize(kVolumeHeaderSize - 1, ' ');
  header += '\n';
  out.write(header.data(), static_cast<std::streamsize>(header.size()));

  for (long k = 0; k < volume.data.cols(); ++k)
    for (long i = 0; i < n; ++i) write_complex64(out, volume.data(i, k));
  if (!out) bad_file(path, "write failed");
}

Volume read_volume(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) bad_file(path, "cannot open");
  std::string header(kVolumeHeaderSize, '\0');
  in.read(header.data(), kVolumeHeaderSize);
  if (!in) bad_file(path, "truncated header");

  std::istringstream hs(header);
  std::string magic, elem;
  int nx = 0, ny = 0, nz = 0;
  long k = 0;
  hs >> magic >> nx >> ny >> nz >> k >> elem;
  if (magic != "GRVOL1" || elem != "c64")
    bad_file(path, "not a GRVOL1/c64 volume");
  if (nx < 1 || ny < 1 || nz < 1 || k < 1) bad_file(path, "bad dimensions");

  Volume volume;
  volume.dims = {nx, ny, nz};
  const long n = static_cast<long>(nx) * ny * nz;
  volume.data.resize(n, k);
  for (long col = 0; col < k; ++col)
    for (long i = 0; i < n; ++i) volume.data(i, col) = read_complex64(in);
  if (!in) bad_file(path, "truncated payload");
  return volume;
}

Volume real_volume(const std::array<int, 3>& dims, const RVec& values) {
  Volume v;
  v.dims = dims;
  v.data.resize(values.size(), 1);
  for (long i = 0; i < values.size(); ++i) v.data(i, 0) = cplx(values[i], 0.0);
  return v;
}

void write_measurements(const std::filesystem::path& path,
                        const MeasurementSet& data,
                        const std::string& system_digest) {
  std::ofstream out(path, std::ios::binary);
  if (!out) bad_file(path, "cannot open for writing");
  std::ostringstream header;
  header << "GRMEAS1 digest " << system_digest << " receivers "
         << data.receiver_count << " groups " << data.group_count() << " rows";
  for (const auto& g : data.groups) header << ' ' << g.y.size();
  header << " order t,f\n";
  const std::string h = header.str();
  out.write(h.data(), static_cast<std::streamsize>(h.size()));
  for (const auto& g : data.groups)
    for (long i = 0; i < g.y.size(); ++i) write_complex64(out, g.y[i]);
  if (!out) bad_file(path, "write failed");
}

RawMeasurements read_measurements(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) bad_file(path, "cannot open");
  std::string header;
  if (!std::getline(in, header)) bad_file(path, "missing header");

  std::istringstream hs(header);
  std::string magic, key;
  RawMeasurements raw;
  hs >> magic;
  if (magic != "GRMEAS1") bad_file(path, "not a GRMEAS1 file");
  int group_count = 0;
  std::vector<long> rows;
  while (hs >> key) {
    if (key == "digest") {
      hs >> raw.system_digest;
    } else if (key == "receivers") {
      hs >> raw.receiver_count;
    } else if (key == "groups") {
      hs >> group_count;
    } else if (key == "rows") {
      for (int k = 0; k < group_count; ++k) {
        long r = 0;
        if (!(hs >> r)) bad_file(path, "bad row counts");
        rows.push_back(r);
      }
    } else if (key == "order") {
      std::string order;
      hs >> order;
      if (order != "t,f") bad_file(path, "unsupported channel order");
    } else {
      bad_file(path, "unknown header field '" + key + "'");
    }
  }
  if (group_count < 1 || static_cast<int>(rows.size()) != group_count)
    bad_file(path, "bad group counts");

  for (long r : rows) {
    CVec y(r);
    for (long i = 0; i < r; ++i) y[i] = read_complex64(in);
    raw.group_data.push_back(std::move(y));
  }
  if (!in) bad_file(path, "truncated payload");
  return raw;
}

MeasurementSet bind_measurements(const RawMeasurements& raw,
                                 const SceneConfig& cfg) {
  if (raw.system_digest != system_digest(cfg))
    throw DigestMismatchError(
        "measurement data was produced with a different system config "
        "(digest " + raw.system_digest + " vs " + system_digest(cfg) + ")");
  if (static_cast<int>(raw.group_data.size()) != cfg.grouping.group_count())
    throw ConfigError("(data)", "group count does not match the config");
  const long s_count = static_cast<long>(cfg.array.receivers.size());
  if (raw.receiver_count != s_count)
    throw ConfigError("(data)", "receiver count does not match the config");

  MeasurementSet set;
  set.receiver_count = raw.receiver_count;
  for (int k = 0; k < cfg.grouping.group_count(); ++k) {
    const auto& channels = cfg.grouping.groups[k];
    if (raw.group_data[k].size() !=
        s_count * static_cast<long>(channels.size()))
      throw ConfigError("(data)", "group " + std::to_string(k) +
                                      " row count does not match the config");
    set.groups.push_back({channels, raw.group_data[k]});
  }
  return set;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) bad_file(path, "cannot open");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_file(const std::filesystem::path& path,
                     const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) bad_file(path, "cannot open for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) bad_file(path, "write failed");
}

}  // namespace gri
