#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>

#include "qlab/torus.hpp"

using namespace qlab;
constexpr double kPi = std::numbers::pi;

TEST_CASE("real modes and Parseval") {
  TorusSpectralField f = TorusSpectralField::real_mode(2.0, 8, {1, 0, 2, 0}, 0.5, -0.25);
  CHECK(f.conjugate_symmetry_defect() == 0.0);
  CHECK(f.zero_mean());
  const Point x{0.3, 0.7, 0.1, 1.9};
  const double phase = 2 * kPi * (0.3 + 2 * 0.1) / 2.0;
  CHECK(f(x) == doctest::Approx(0.5 * std::cos(phase) - 0.25 * std::sin(phase)).epsilon(1e-13));
  CHECK(f.parseval_defect(8) < 1e-14);
  CHECK(f.wavenumber_sq({1, 0, 2, 0}) == doctest::Approx(std::pow(2 * kPi / 2.0, 2) * 5));
  CHECK_THROWS_AS(f.set({5, 0, 0, 0}, 1.0), std::out_of_range);
  Jet j = f.jet(x, 2);
  CHECK(j.value() == doctest::Approx(f(x)));
}

TEST_CASE("Green's function basics") {
  TorusGreen g(2 * kPi, 16, {0.5, 1.0, 1.5, 2.0});
  CHECK(g.coeff({0, 0, 0, 0}) == Complex(0.0, 0.0));
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> pos(0.0, 2 * kPi);
  for (int k = 0; k < 100; ++k) {
    Point a{pos(rng), pos(rng), pos(rng), pos(rng)}, b{pos(rng), pos(rng), pos(rng), pos(rng)};
    CHECK(std::abs(g.between(a, b) - g.between(b, a)) <= 1e-10);
  }
  // Single mode: int G(xi, .) Delta^2 f = f(xi) - mean f.
  TorusSpectralField f = TorusSpectralField::real_mode(2 * kPi, 16, {1, 2, 0, -1}, 0.7, 0.3);
  f.add({0, 0, 0, 0}, 2.0);
  CHECK(g.pair(f.bilaplacian()) == doctest::Approx(f(g.source()) - 2.0).epsilon(1e-13));
}

TEST_CASE("log singularity fit") {
  TorusGreen g64 = biharmonic_green_torus(64, 2 * kPi, {1.0, 2.0, 3.0, 4.0});
  GreenDecomposition d64 = fit_log_singularity(g64);
  CHECK(d64.expected_c_log == doctest::Approx(-1.0 / (8 * kPi * kPi)));
  CHECK(d64.c_log == doctest::Approx(-1.0 / (8 * kPi * kPi)).epsilon(0.02));
  CHECK(d64.consistent);

  // Same window for both truncations: two coarse grid spacings to L/8.
  const std::array<double, 2> window{2 * kPi / 16, 2 * kPi / 8};
  GreenDecomposition d32 = fit_log_singularity(biharmonic_green_torus(32, 2 * kPi, {1.0, 2.0, 3.0, 4.0}), window);
  GreenDecomposition d64w = fit_log_singularity(g64, window);
  CHECK(d64w.relative_error < 0.5 * d32.relative_error);

  // The Laplacian's Green's function has an r^{-2} singularity.
  GreenDecomposition lap = fit_log_singularity(TorusGreen(2 * kPi, 32, {0, 0, 0, 0}, 1), window);
  CHECK_FALSE(lap.consistent);

  CHECK_THROWS_AS(fit_log_singularity(g64, {0.01, 0.5}), std::invalid_argument);
}

TEST_CASE("representation identity") {
  TorusSpectralField c(1.0, 8);
  c.set({0, 0, 0, 0}, 3.0);
  CHECK(representation_check(c) == 0.0);
  CHECK(representation_check(TorusSpectralField::real_mode(1.0, 8, {1, 0, 0, 0}, 1.0)) < 1e-14);
  std::mt19937_64 rng(8);
  for (int k = 0; k < 10; ++k)
    CHECK(representation_check(TorusSpectralField::random_real(1.0, 16, 10, 3, rng)) <= 1e-9);
}

TEST_CASE("regular part field") {
  TorusSpectralField zero(1.0, 8);
  CHECK(regular_part_field(zero).coefficients().empty());
  TorusSpectralField c(1.0, 8);
  c.set({0, 0, 0, 0}, 4.0);
  CHECK(std::abs(regular_part_field(c).coeff({0, 0, 0, 0})) == 0.0);
  TorusSpectralField b = TorusSpectralField::real_mode(1.0, 8, {0, 1, 1, 0}, 0.6);
  const double w = b.wavenumber_sq({0, 1, 1, 0});
  TorusSpectralField phi = regular_part_field(b);
  CHECK(std::abs(phi.coeff({0, 1, 1, 0}) - 2.0 * b.coeff({0, 1, 1, 0}) / (w * w)) < 1e-16);
}

TEST_CASE("grid export round trip") {
  std::mt19937_64 rng(1);
  TorusSpectralField f = TorusSpectralField::random_real(1.5, 8, 4, 2, rng);
  const auto path = std::filesystem::temp_directory_path() / "qlab_grid_roundtrip.bin";
  export_grid(path.string(), f, 6);
  int n = 0;
  double side = 0;
  auto v = import_grid(path.string(), &n, &side);
  CHECK(n == 6);
  CHECK(side == 1.5);
  CHECK(v == f.grid_samples(6));
  {
    std::ofstream bad(path, std::ios::binary);
    bad << "NOTAGRID";
  }
  CHECK_THROWS(import_grid(path.string()));
  std::filesystem::remove(path);
}
