#include <doctest.h>

#include <cmath>
#include <numbers>

#include "qlab/quadrature.hpp"

using namespace qlab;
constexpr double kPi = std::numbers::pi;

TEST_CASE("Gauss-Legendre integrates polynomials of degree 2n-1 exactly") {
  Rule1D r = gauss_legendre(5, -1.0, 2.0);
  double s = 0;
  for (std::size_t i = 0; i < r.nodes.size(); ++i) s += r.weights[i] * std::pow(r.nodes[i], 9);
  CHECK(s == doctest::Approx((std::pow(2.0, 10) - 1.0) / 10.0).epsilon(1e-13));
}

TEST_CASE("composite rule covers every panel") {
  Rule1D r = composite_gauss_legendre(4, {0.0, 0.5, 1.0, 3.0});
  CHECK(r.nodes.size() == 12);
  double s = 0;
  for (std::size_t i = 0; i < r.nodes.size(); ++i) s += r.weights[i] * std::pow(r.nodes[i], 7);
  CHECK(s == doctest::Approx(std::pow(3.0, 8) / 8).epsilon(1e-13));
}

TEST_CASE("sphere and ball rules reproduce area and volume") {
  for (int nt : {2, 4, 7}) {
    SphereRule s = SphereRule::product(nt, 8);
    double w = 0;
    for (double x : s.weights) w += x;
    CHECK(w == doctest::Approx(2 * kPi * kPi).epsilon(1e-12));
    for (const auto& p : s.nodes) CHECK(p[0] * p[0] + p[1] * p[1] + p[2] * p[2] + p[3] * p[3] == doctest::Approx(1.0));
  }
  SphereRule s = SphereRule::product(6, 12);
  BallRule b = BallRule::polar(2.5, 8, s, {1, 0, 0, 0});
  double v = 0;
  for (double x : b.weights) v += x;
  CHECK(v == doctest::Approx(ball_volume(2.5)).epsilon(1e-12));
  CHECK(ball_volume(2.5) == doctest::Approx(kPi * kPi * std::pow(2.5, 4) / 2));
  CHECK(sphere_area(2.5) == doctest::Approx(2 * kPi * kPi * std::pow(2.5, 3)));
}

TEST_CASE("sphere rule integrates low-degree polynomials exactly") {
  SphereRule s = SphereRule::product(4, 8);
  double x4 = 0, x1x2 = 0, x1sq = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto& p = s.nodes[i];
    x4 += s.weights[i] * std::pow(p[0], 4);
    x1x2 += s.weights[i] * p[0] * p[1];
    x1sq += s.weights[i] * p[0] * p[0];
  }
  // int_{S^3} x1^2 = pi^2 / 2, int x1^4 = pi^2 / 4.
  CHECK(x1sq == doctest::Approx(kPi * kPi / 2).epsilon(1e-12));
  CHECK(x4 == doctest::Approx(kPi * kPi / 4).epsilon(1e-12));
  CHECK(std::abs(x1x2) < 1e-13);
}
