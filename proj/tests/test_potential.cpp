#include <doctest.h>

#include <cmath>
#include <numbers>

#include "qlab/bubble.hpp"
#include "qlab/potential.hpp"

using namespace qlab;
constexpr double kPi = std::numbers::pi;

TEST_CASE("bubble density has mass 8 pi^2") {
  Density d = Density::bubble(1.0);
  CHECK(d.cutoff > 0);
  CHECK(d.truncation_mass < 1e-10);
  CHECK(density_mass(d) == doctest::Approx(8 * kPi * kPi).epsilon(1e-9));
}

TEST_CASE("the bubble is its own logarithmic potential") {
  RescaledBubble rb(1.0);
  Density d = Density::bubble(1.0);
  CHECK(std::abs(log_potential(d, {0, 0, 0, 0})) < 1e-12);
  const Point x{3.0, 4.0, 0.0, 0.0};
  CHECK(std::abs(log_potential(d, x) - rb.value(5.0)) < 1e-3);
  CHECK(std::abs(potential(d, x, {PotentialKind::laplacian}) - rb.laplacian(5.0)) < 1e-3);
  // Radial derivative along x / |x|.
  double dr = 0;
  for (int i = 0; i < kDim; ++i) dr += potential(d, x, {PotentialKind::gradient, i}) * x[i] / 5.0;
  CHECK(dr == doctest::Approx(rb.d_r(5.0)).epsilon(1e-4));
  double drl = 0;
  for (int i = 0; i < kDim; ++i) drl += potential(d, x, {PotentialKind::grad_laplacian, i}) * x[i] / 5.0;
  CHECK(drl == doctest::Approx(rb.d_r_laplacian(5.0)).epsilon(1e-4));
}

TEST_CASE("odd derivatives vanish at the centre of an even density") {
  Density d = Density::bubble(1.5);
  for (int i = 0; i < kDim; ++i) {
    CHECK(std::abs(potential(d, {0, 0, 0, 0}, {PotentialKind::gradient, i})) < 1e-12);
    CHECK(std::abs(potential(d, {0, 0, 0, 0}, {PotentialKind::grad_laplacian, i})) < 1e-10);
  }
}

TEST_CASE("derivative kernels and differences of the potential converge together") {
  Density d = Density::bubble(1.0);
  RescaledBubble rb(1.0);
  const Point x{1.2, -0.7, 0.4, 2.0};
  const double r = std::sqrt(1.44 + 0.49 + 0.16 + 4.0), h = 1e-3;
  std::vector<double> kernel_err, gap;
  for (const PotentialRule& rule : {PotentialRule{}, PotentialRule{}.refined()}) {
    double ke = 0, g = 0;
    for (int i : {0, 2}) {
      const double k = potential(d, x, {PotentialKind::gradient, i}, rule);
      Point p = x, m = x;
      p[i] += h;
      m[i] -= h;
      const double fd = (log_potential(d, p, rule) - log_potential(d, m, rule)) / (2 * h);
      ke = std::max(ke, std::abs(k - rb.d_r(r) * x[i] / r));
      g = std::max(g, std::abs(k - fd));
    }
    kernel_err.push_back(ke);
    gap.push_back(g);
  }
  CHECK(kernel_err[0] < 1e-3);
  CHECK(kernel_err[1] < 0.1 * kernel_err[0]);
  CHECK(gap[1] < 0.25 * gap[0]);

  double trace = 0;
  for (int i = 0; i < kDim; ++i) trace += potential(d, x, {PotentialKind::hessian, i, i});
  CHECK(trace == doctest::Approx(potential(d, x, {PotentialKind::laplacian})).epsilon(1e-8));
  CHECK(potential(d, x, {PotentialKind::hessian, 0, 2}) ==
        doctest::Approx(potential(d, x, {PotentialKind::hessian, 2, 0})).epsilon(1e-10));
}

TEST_CASE("far-field slope is minus the mass over 4 pi^2") {
  Density d = Density::bubble(1.0);
  const double mass = density_mass(d);
  const double r1 = 200.0, r2 = 400.0;
  double slope = (log_potential(d, {r2, 0, 0, 0}) - log_potential(d, {r1, 0, 0, 0})) / std::log(r2 / r1);
  CHECK(slope == doctest::Approx(-mass / (4 * kPi * kPi)).epsilon(0.01));
  CHECK(slope == doctest::Approx(-2.0).epsilon(0.01));
  // grad Delta v ~ (mass / pi^2) x / |x|^4.
  const double r = 100.0;
  CHECK(potential(d, {r, 0, 0, 0}, {PotentialKind::grad_laplacian, 0}) ==
        doctest::Approx(mass / (kPi * kPi) / std::pow(r, 3)).epsilon(0.01));
}

TEST_CASE("quadrature converges under refinement") {
  Density d = Density::bubble(1.0);
  RescaledBubble rb(1.0);
  const Point x{2.0, 1.0, -1.0, 0.5};
  const double r = std::sqrt(4 + 1 + 1 + 0.25);
  PotentialRule coarse{6, 6, 8, 1.0};
  double e_coarse = std::abs(log_potential(d, x, coarse) - rb.value(r));
  double e_fine = std::abs(log_potential(d, x, coarse.refined()) - rb.value(r));
  CHECK(e_fine < e_coarse);
  CHECK(coarse.refined().radial_nodes == 12);
  CHECK(to_string(PotentialKind::grad_laplacian) == "grad_laplacian");
}
