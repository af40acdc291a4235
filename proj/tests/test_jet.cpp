#include <doctest.h>

#include <cmath>
#include <random>

#include "qlab/exact_poly.hpp"
#include "qlab/fields.hpp"
#include "qlab/jet.hpp"

using namespace qlab;

TEST_CASE("jet partials of a product of exponentials") {
  const Point x{0.3, -0.4, 0.2, 0.7};
  auto v = jet_point(x, 4);
  Jet f = exp(v[0] * v[1]) + sin(v[2]) * v[3];
  const double e = std::exp(x[0] * x[1]);
  CHECK(f.value() == doctest::Approx(e + std::sin(x[2]) * x[3]).epsilon(1e-14));
  CHECK(f.partial({1, 0, 0, 0}) == doctest::Approx(x[1] * e).epsilon(1e-14));
  CHECK(f.partial({1, 1, 0, 0}) == doctest::Approx(e * (1 + x[0] * x[1])).epsilon(1e-14));
  CHECK(f.partial({2, 2, 0, 0}) ==
        doctest::Approx(e * (2 + 4 * x[0] * x[1] + x[0] * x[0] * x[1] * x[1])).epsilon(1e-13));
  CHECK(f.partial({0, 0, 3, 1}) == doctest::Approx(-std::cos(x[2])).epsilon(1e-14));
  CHECK(f.partial({0, 0, 0, 2}) == 0.0);
}

TEST_CASE("log inverts exp and pow agrees with repeated products") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const Point x{unit(rng), unit(rng), unit(rng), unit(rng)};
    auto v = jet_point(x, 4);
    Jet s = 2.0 + v[0] * v[1] + 0.3 * v[2] * v[3] * v[3];
    Jet back = log(exp(s));
    Jet cube = pow(s, 3.0), prod = s * s * s;
    Jet root = sqrt(s) * sqrt(s);
    for (int k = 0; k < Jet::kSize; ++k) {
      CHECK(back.coeff_at(k) == doctest::Approx(s.coeff_at(k)).epsilon(1e-12).scale(1.0));
      CHECK(cube.coeff_at(k) == doctest::Approx(prod.coeff_at(k)).epsilon(1e-12).scale(1.0));
      CHECK(root.coeff_at(k) == doctest::Approx(s.coeff_at(k)).epsilon(1e-12).scale(1.0));
    }
  }
}

TEST_CASE("division and formal derivative") {
  auto v = jet_point({0.5, 0.1, 0.0, 0.0}, 4);
  Jet q = 1.0 / (1.0 + v[0] * v[0]);
  // d/dx (1+x^2)^{-1} = -2x/(1+x^2)^2
  CHECK(q.partial({1, 0, 0, 0}) == doctest::Approx(-2 * 0.5 / std::pow(1.25, 2)));
  Jet dq = q.d(0);
  CHECK(dq.order() == 3);
  CHECK(dq.value() == doctest::Approx(q.partial({1, 0, 0, 0})));
  CHECK(dq.partial({2, 0, 0, 0}) == doctest::Approx(q.partial({3, 0, 0, 0})));
}

TEST_CASE("atan derivative") {
  auto v = jet_point({0.4, 0, 0, 0}, 3);
  Jet a = atan(v[0]);
  CHECK(a.value() == doctest::Approx(std::atan(0.4)));
  CHECK(a.partial({1, 0, 0, 0}) == doctest::Approx(1.0 / 1.16));
}

TEST_CASE("jet layout is a bijection onto degree-graded slots") {
  CHECK(jet_layout::size_for_order(4) == 70);
  CHECK(jet_layout::size_for_order(2) == 15);
  for (int s = 0; s < Jet::kSize; ++s) {
    const auto& a = jet_layout::index(s);
    CHECK(jet_layout::slot(a) == s);
    CHECK(jet_layout::degree(s) == a[0] + a[1] + a[2] + a[3]);
    if (s > 0) CHECK(jet_layout::degree(s) >= jet_layout::degree(s - 1));
  }
}

TEST_CASE("centred finite-difference weights") {
  auto w = fd_weights(2, 2);
  REQUIRE(w.size() == 5);
  const double expect[5] = {-1.0 / 12, 4.0 / 3, -5.0 / 2, 4.0 / 3, -1.0 / 12};
  for (int i = 0; i < 5; ++i) CHECK(w[i] == doctest::Approx(expect[i]).epsilon(1e-13));
  auto w1 = fd_weights(1, 2);
  double moment = 0;
  for (int i = 0; i < 5; ++i) moment += w1[i] * (i - 2);
  CHECK(moment == doctest::Approx(1.0));
}

TEST_CASE("sampled fields differentiate to stencil accuracy") {
  auto fn = [](const Point& x) { return std::sin(x[0]) * std::exp(0.5 * x[1]) + x[2] * x[3] * x[3]; };
  ScalarField s = ScalarField::sampled(fn, Box::cube(2.0), 0.02);
  ScalarField a = ScalarField::analytic([](const JetPoint& x) { return sin(x[0]) * exp(0.5 * x[1]) + x[2] * x[3] * x[3]; });
  const Point x{0.2, 0.3, -0.1, 0.4};
  Jet js = s.jet(x, 4), ja = a.jet(x, 4);
  CHECK(s.mode() == DerivativeMode::finite_difference);
  for (const MultiIndex& m : {MultiIndex{1, 0, 0, 0}, MultiIndex{1, 1, 0, 0}, MultiIndex{0, 0, 1, 2}, MultiIndex{2, 2, 0, 0}})
    CHECK(std::abs(js.partial(m) - ja.partial(m)) < 1e-4);
  CHECK_THROWS(s.jet({1.99, 0, 0, 0}, 2));
}

TEST_CASE("metric positivity is enforced") {
  Eigen::Matrix4d g = Eigen::Matrix4d::Identity();
  CHECK_NOTHROW(require_positive_definite(g));
  g(2, 2) = 1e-12;
  CHECK_THROWS_AS(require_positive_definite(g), std::domain_error);
}

TEST_CASE("exact polynomials") {
  ExactPoly x = ExactPoly::monomial({1, 0, 0, 0}, 1, 3), y = ExactPoly::monomial({0, 1, 0, 0}, Rational(1, 3), 3);
  ExactPoly p = (x + y) * (x - y);
  CHECK(p.coeff({2, 0, 0, 0}) == 1);
  CHECK(p.coeff({0, 2, 0, 0}) == Rational(-1, 9));
  CHECK(p.coeff({1, 1, 0, 0}) == 0);
  CHECK(p.derivative(0).coeff({1, 0, 0, 0}) == 2);
  // Terms above the validity degree are dropped.
  ExactPoly cubic = p * x;
  CHECK((cubic * x).is_zero());
  CHECK(p.eval(Point{2, 3, 0, 0}) == doctest::Approx(3.0));
  CHECK(p.to_string() == "x1^2 - 1/9*x2^2 + O(r^4)");
  CHECK(to_double(Rational(1, 4)) == 0.25);
}
