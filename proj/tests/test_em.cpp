#include <doctest.h>

#include <cmath>

#include "gri/em.hpp"
#include "gri/grid.hpp"
#include "oracles.hpp"
#include "reference_physics.hpp"

using namespace gri;
using namespace gri::testref;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_SUITE("em_core") {

TEST_CASE("scalar_green closed-form values") {
  const Vec3 origin = Vec3::Zero();

  // Static limit: k0 = 0, R = 1.
  cplx g = scalar_green({1, 0, 0}, origin, {0.0, 0.0});
  CHECK(g.real() == doctest::Approx(1.0 / (4.0 * kPi)).epsilon(1e-14));
  CHECK(g.imag() == doctest::Approx(0.0));

  // Full-wavelength phase: k0 = 2*pi, R = 1.
  g = scalar_green({0, 1, 0}, origin, {2.0 * kPi, 2.0 * kPi * kSpeedOfLight});
  CHECK(g.real() == doctest::Approx(1.0 / (4.0 * kPi)).epsilon(1e-12));
  CHECK(std::abs(g.imag()) < 1e-15);

  // Phase 2*pi at R = 2 with k0 = pi.
  g = scalar_green({0, 0, 2}, origin, {kPi, kPi * kSpeedOfLight});
  CHECK(g.real() == doctest::Approx(1.0 / (8.0 * kPi)).epsilon(1e-12));
  CHECK(std::abs(g.imag()) < 1e-15);

  CHECK_THROWS_AS(scalar_green(origin, origin, {1.0, kSpeedOfLight}),
                  std::domain_error);
}

TEST_CASE("dyadic_green matches the reference transcription") {
  auto rng = seeded_rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const Vec3 a = random_point(rng, 2.0);
    Vec3 b = random_point(rng, 2.0);
    if ((a - b).norm() < 1e-3) b[0] += 1.0;
    const double k0 = 5.0 + 40.0 * trial;
    const Wavenumber k{k0, k0 * kSpeedOfLight};
    const CMat3 got = dyadic_green(a, b, k);
    const CMat3 want = ref_dyadic_green(a, b, k0);
    CHECK((got - want).norm() < 1e-12 * want.norm());
  }
  CHECK_THROWS_AS(dyadic_green(Vec3::Zero(), Vec3::Zero(),
                               Wavenumber{1.0, kSpeedOfLight}),
                  std::domain_error);
  CHECK_THROWS_AS(dyadic_green({1, 0, 0}, Vec3::Zero(), Wavenumber{0.0, 0.0}),
                  std::domain_error);
}

TEST_CASE("dyadic_green reciprocity over random point pairs") {
  auto rng = seeded_rng(12);
  for (int trial = 0; trial < 100; ++trial) {
    const Vec3 a = random_point(rng, 3.0);
    Vec3 b = random_point(rng, 3.0);
    if ((a - b).norm() < 1e-3) b[2] += 1.0;
    const Wavenumber k{20.0, 20.0 * kSpeedOfLight};
    const CMat3 gab = dyadic_green(a, b, k);
    const CMat3 gba = dyadic_green(b, a, k);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        const double scale = std::abs(gab(i, j)) + std::abs(gba(j, i)) + 1e-300;
        CHECK(std::abs(gab(i, j) - gba(j, i)) / scale < 1e-12);
      }
  }
}

TEST_CASE("dyadic_green transverse isotropy and longitudinal decay") {
  const Wavenumber k{100.0, 100.0 * kSpeedOfLight};
  const CMat3 g = dyadic_green({0, 0, 1.5}, Vec3::Zero(), k);
  CHECK(std::abs(g(0, 0) - g(1, 1)) < 1e-14 * std::abs(g(0, 0)));

  // k0 R = 1000 along z: longitudinal term carries only the near-field
  // factors, so |G_zz| / |G_xx| is small.
  const Wavenumber k2{1000.0, 1000.0 * kSpeedOfLight};
  const CMat3 far = dyadic_green({0, 0, 1.0}, Vec3::Zero(), k2);
  CHECK(std::abs(far(2, 2)) / std::abs(far(0, 0)) < 0.01);
}

TEST_CASE("far-field reduction to the transverse scalar form") {
  auto rng = seeded_rng(13);
  for (int trial = 0; trial < 25; ++trial) {
    const Vec3 src = random_point(rng, 0.5);
    Vec3 dir = random_point(rng, 1.0);
    if (dir.norm() < 1e-3) dir = Vec3::UnitX();
    dir.normalize();
    const double dist = 1.0 + trial * 0.25;
    const double k0 = 150.0 + 90.0 * trial;  // k0 R > 100 throughout
    const Vec3 r = src + dist * dir;
    const Wavenumber k{k0, k0 * kSpeedOfLight};

    const CMat3 g = dyadic_green(r, src, k);
    const CMat3 transverse =
        scalar_green(r, src, k) *
        (Eigen::Matrix3d::Identity() - dir * dir.transpose()).cast<cplx>();
    const double rel = (g - transverse).norm() / g.norm();
    CHECK(rel < 3.0 / (k0 * dist));
  }
}

TEST_CASE("incident_field linearity, reciprocity, far-field polarization") {
  const Wavenumber k = Wavenumber::from_frequency(2.0e9);
  const Vec3 tx(0.1, -0.2, 0.05);
  const Vec3 r(1.1, 0.8, -0.4);

  const CVec3 ex = incident_field(r, tx, Vec3::UnitX(), k);
  const CVec3 ez = incident_field(r, tx, Vec3::UnitZ(), k);
  const CVec3 mixed = incident_field(r, tx, (Vec3::UnitX() + Vec3::UnitZ()).normalized(), k);
  const CVec3 combo = (ex + ez) / std::sqrt(2.0);
  CHECK((mixed - combo).norm() < 1e-12 * combo.norm());

  // Swapping field point and source transposes the dyad.
  const CVec3 swapped = incident_field(tx, r, Vec3::UnitZ(), k);
  const CVec3 expected = cplx(0.0, k.omega * kMu0) *
                         (dyadic_green(r, tx, k).transpose() *
                          Vec3::UnitZ().cast<cplx>());
  CHECK((swapped - expected).norm() < 1e-12 * expected.norm());

  // Far field broadside to a z-dipole is z-polarized.
  const Vec3 far_point = tx + Vec3(60.0, 0.5, 0.3);
  const CVec3 far = incident_field(far_point, tx, Vec3::UnitZ(), k);
  CHECK(std::abs(far[2]) > 100.0 * std::abs(far[0]));
  CHECK(std::abs(far[2]) > 100.0 * std::abs(far[1]));

  CHECK_THROWS_AS(incident_field(tx, tx, Vec3::UnitZ(), k), std::domain_error);
}

TEST_CASE("measurement matrix shape and single-entry chain") {
  const ImagingGrid grid({0, -0.6, 0.5}, {0.3, 0.3, 0.3}, {3, 2, 2});
  const std::vector<Vec3> rx = {{-0.4, 0.2, 0.1}, {0.4, 0.25, 0.0},
                                {0.0, 0.3, 0.6}};
  const Transmitter tx{{-0.5, 0.3, 0.0}, Vec3::UnitZ()};
  const Wavenumber k = Wavenumber::from_frequency(1.5e9);

  const MeasurementMatrix m =
      assemble_measurement_matrix(grid, rx, tx, k, Axis::Z);
  CHECK(m.entries.rows() == 3);
  CHECK(m.entries.cols() == grid.voxel_count());

  // Every entry equals the independently composed chain of Green's dyads.
  for (long s = 0; s < 3; ++s)
    for (long n = 0; n < grid.voxel_count(); ++n) {
      const cplx want = ref_matrix_entry(rx[s], grid.voxel_center(n),
                                         tx.position, tx.polarization, k.k0,
                                         k.omega, grid.voxel_volume(), 2);
      CHECK(std::abs(m.entries(s, n) - want) < 1e-12 * std::abs(want));
    }
}

TEST_CASE("sensor clearance precondition") {
  const ImagingGrid grid({0, 0, 0}, {1, 1, 1}, {4, 4, 4});
  const Transmitter tx{{0.0, 0.0, 0.2}, Vec3::UnitZ()};  // inside the box
  const std::vector<Vec3> rx = {{2.0, 0, 0}};
  const Wavenumber k = Wavenumber::from_frequency(1e9);
  CHECK_THROWS_AS(assemble_measurement_matrix(grid, rx, tx, k, Axis::Z),
                  std::invalid_argument);

  const Transmitter tx_near{{0.0, 0.0, 0.55}, Vec3::UnitZ()};  // 0.05 m away
  CHECK_THROWS_AS(assemble_measurement_matrix(grid, rx, tx_near, k, Axis::Z),
                  std::invalid_argument);
}

TEST_CASE("assembly is independent of the worker count") {
  const ImagingGrid grid({0, -0.6, 0.5}, {0.5, 0.2, 0.25}, {5, 2, 3});
  std::vector<Vec3> rx;
  for (int i = 0; i < 7; ++i) rx.push_back({-0.3 + 0.1 * i, 0.0, 0.1});
  const Transmitter tx{{-0.5, 0.2, 0.0}, Vec3::UnitZ()};
  const Wavenumber k = Wavenumber::from_frequency(2.5e9);

  const CMat a1 =
      assemble_measurement_matrix(grid, rx, tx, k, Axis::Z,
                                  GreensMode::Dyadic, 1).entries;
  const CMat a4 =
      assemble_measurement_matrix(grid, rx, tx, k, Axis::Z,
                                  GreensMode::Dyadic, 4).entries;
  CHECK(a1 == a4);  // bitwise
}

TEST_CASE("voxel volume scaling homogeneity") {
  auto rng = seeded_rng(14);
  std::vector<Vec3> centers, rx;
  for (int i = 0; i < 6; ++i) centers.push_back(random_point(rng, 0.2));
  for (int i = 0; i < 4; ++i)
    rx.push_back(random_point(rng, 0.3) + Vec3(0, 2.0, 0));
  const Transmitter tx{{0, -2.0, 0}, Vec3::UnitZ()};
  const Wavenumber k = Wavenumber::from_frequency(1.2e9);

  const CMat a = assemble_measurement_entries(centers, 1e-4, rx, tx, k, Axis::Z);
  const CMat a2 = assemble_measurement_entries(centers, 2e-4, rx, tx, k, Axis::Z);
  CHECK((a2 - 2.0 * a).norm() < 1e-14 * a.norm());
}

TEST_CASE("scalar mode drops the dyadic projectors") {
  std::vector<Vec3> centers = {{0.0, 0.0, 0.0}};
  std::vector<Vec3> rx = {{1.2, 0.4, -0.3}};
  const Transmitter tx{{-0.8, 1.0, 0.6}, Vec3::UnitZ()};
  const Wavenumber k = Wavenumber::from_frequency(1.0e9);

  const CMat a =
      assemble_measurement_entries(centers, 1e-3, rx, tx, k, Axis::Z,
                                   GreensMode::Scalar);
  const cplx scale(0.0, k.omega * kMu0);
  const cplx want = scale * 1e-3 * ref_scalar_green(rx[0], centers[0], k.k0) *
                    scale * ref_scalar_green(centers[0], tx.position, k.k0);
  CHECK(std::abs(a(0, 0) - want) < 1e-12 * std::abs(want));
}

TEST_CASE("forward and adjoint application") {
  auto rng = seeded_rng(15);
  const CMat a = random_cmat(rng, 7, 5);

  const CVec zero = CVec::Zero(5);
  CHECK(apply_forward(a, zero).norm() == 0.0);
  CHECK(apply_adjoint(a, CVec::Zero(7)).norm() == 0.0);

  const CVec x1 = random_cvec(rng, 5), x2 = random_cvec(rng, 5);
  const CVec sum = apply_forward(a, x1 + x2);
  CHECK((sum - apply_forward(a, x1) - apply_forward(a, x2)).norm() <
        1e-12 * sum.norm());

  CVec e2 = CVec::Zero(5);
  e2[2] = cplx(2.0, -1.0);
  CHECK((apply_forward(a, e2) - cplx(2.0, -1.0) * a.col(2)).norm() < 1e-14);

  CHECK_THROWS_AS(apply_forward(a, CVec::Zero(4)), std::invalid_argument);
  CHECK_THROWS_AS(apply_adjoint(a, CVec::Zero(5)), std::invalid_argument);

  // Unitary A: forward of adjoint restores the data.
  Eigen::JacobiSVD<CMat> svd(random_cmat(rng, 5, 5),
                             Eigen::ComputeFullU | Eigen::ComputeFullV);
  const CMat q = svd.matrixU();
  const CVec y = random_cvec(rng, 5);
  CHECK((apply_forward(q, apply_adjoint(q, y)) - y).norm() < 1e-12 * y.norm());
}

TEST_CASE("adjoint identity on assembled matrices") {
  const ImagingGrid grid({0, -0.6, 0.5}, {0.5, 0.2, 0.25}, {5, 2, 3});
  std::vector<Vec3> rx;
  for (int i = 0; i < 8; ++i) rx.push_back({-0.35 + 0.1 * i, 0.0, 0.2});
  const Transmitter tx{{0.0, 0.3, 0.7}, Vec3::UnitZ()};

  auto rng = seeded_rng(16);
  for (double ghz : {0.7, 1.4, 2.8}) {
    const CMat a = assemble_measurement_matrix(
                       grid, rx, tx, Wavenumber::from_frequency(ghz * 1e9),
                       Axis::Z).entries;
    for (int trial = 0; trial < 20; ++trial) {
      const CVec x = random_cvec(rng, a.cols());
      const CVec y = random_cvec(rng, a.rows());
      const cplx lhs = (a * x).dot(y);          // <Ax, y>
      const cplx rhs = x.dot(a.adjoint() * y);  // <x, A*y>
      const double denom = (a * x).norm() * y.norm();
      CHECK(std::abs(lhs - rhs) / denom < 1e-10);
    }
  }
}

}  // TEST_SUITE
