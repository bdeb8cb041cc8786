#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace gri {

using cplx = std::complex<double>;
using Vec3 = Eigen::Vector3d;
using CVec3 = Eigen::Vector3cd;
using CMat3 = Eigen::Matrix3cd;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;
using RVec = Eigen::VectorXd;

inline constexpr double kSpeedOfLight = 299792458.0;        // m/s
inline constexpr double kMu0 = 4.0e-7 * 3.14159265358979323846;  // H/m

enum class Axis { X = 0, Y = 1, Z = 2 };

/// Configuration/input validation failure; `path` points at the offending
/// config field (e.g. "grid.divisions[1]").
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string path, const std::string& what)
      : std::runtime_error(path + ": " + what), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

/// Numeric failure during a solve (divergence, singular system, ...).
class NumericError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

Axis parse_axis(const std::string& s);
std::string axis_name(Axis a);

}  // namespace gri
