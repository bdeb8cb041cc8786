#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <vector>

#include "gri/forward.hpp"
#include "gri/types.hpp"

namespace gri {

/// Data file does not belong to the config it is being used with.
class DigestMismatchError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Volume container: N x K complex stack over an nx*ny*nz grid.
struct Volume {
  std::array<int, 3> dims{1, 1, 1};
  CMat data;  // voxel-major (x fastest) rows, one column per group
};

/// GRVOL1 format: 64-byte text header "GRVOL1 nx ny nz K c64" padded with
/// spaces, then little-endian complex64 payload, voxel-major x-fastest,
/// group-major.
void write_volume(const std::filesystem::path& path, const Volume& volume);
Volume read_volume(const std::filesystem::path& path);

Volume real_volume(const std::array<int, 3>& dims, const RVec& values);

/// Measurement file: one ASCII header line
///   GRMEAS1 digest <hex> receivers <S> groups <K> rows <r0> ... order t,f
/// then the group vectors concatenated as little-endian complex64.
void write_measurements(const std::filesystem::path& path,
                        const MeasurementSet& data,
                        const std::string& system_digest);

struct RawMeasurements {
  std::string system_digest;
  int receiver_count = 0;
  std::vector<CVec> group_data;
};
RawMeasurements read_measurements(const std::filesystem::path& path);

/// Attaches the channel lists from the config's grouping; throws
/// DigestMismatchError if the stored digest differs from the config's system
/// digest, and ConfigError if the shapes disagree.
MeasurementSet bind_measurements(const RawMeasurements& raw,
                                 const SceneConfig& cfg);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path,
                     const std::string& text);

}  // namespace gri
