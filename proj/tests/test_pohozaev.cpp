#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "qlab/bubble.hpp"
#include "qlab/pohozaev.hpp"

using namespace qlab;
constexpr double kPi = std::numbers::pi;

namespace {

const ScalarField kOne = ScalarField::constant(1.0);
const ScalarField kZero = ScalarField::constant(0.0);

RadialProfile log_profile() {
  return [](double r) {
    const double q = 1 + r * r;
    return std::array<double, 4>{std::log(q), 2 * r / q, 2 * (1 - r * r) / (q * q), 4 * r * (r * r - 3) / (q * q * q)};
  };
}

}  // namespace

TEST_CASE("ball quadrature weights") {
  BallDomain b = BallDomain::make(3.0);
  CHECK(b.interior_weight_sum() == doctest::Approx(kPi * kPi * 81 / 2).epsilon(1e-8));
  CHECK(b.boundary_weight_sum() == doctest::Approx(2 * kPi * kPi * 27).epsilon(1e-8));
  BallDomain c = b.coarsened();
  CHECK(c.n_r < b.n_r);
  CHECK(c.interior_weight_sum() == doctest::Approx(b.interior_weight_sum()).epsilon(1e-8));
}

TEST_CASE("constant height with u = 0 is the divergence theorem") {
  const double h = 1.7, r = 2.0;
  PohozaevReport rep = pohozaev_balance(kZero, ScalarField::constant(h), kZero, BallDomain::make(r));
  CHECK(rep.i0 == doctest::Approx(h * kPi * kPi * std::pow(r, 4)).epsilon(1e-12));
  CHECK(rep.i1 == doctest::Approx(h * kPi * kPi * std::pow(r, 4)).epsilon(1e-12));
  CHECK(std::abs(rep.residual) < 1e-10);
  CHECK(rep.i2 == 0.0);
  CHECK(rep.i3 == 0.0);
  CHECK(rep.i4 == 0.0);
  CHECK_FALSE(rep.curved);
}

TEST_CASE("flat bubble balance") {
  RescaledBubble rb(1.0);
  PohozaevReport rep = pohozaev_balance(rb.field(), kOne, kZero, BallDomain::make(20.0));
  CHECK(std::abs(rep.residual) / std::abs(rep.i0) <= 1e-4);
  CHECK(std::abs(rep.residual) <= 5 * rep.error_estimate);
  CHECK(rep.unmodeled_remainder == 0.0);
}

TEST_CASE("exact sources satisfy the balance and perturbations do not") {
  RescaledBubble rb(1.3);
  const Point p{0.2, -0.1, 0.3, 0.0};
  ScalarField u = ScalarField::analytic([rb, p](const JetPoint& y) {
    return rb.eval(y, p) + 0.1 * sin(y[0] - 0.5 * y[2]) * y[1];
  });
  ScalarField h = ScalarField::analytic([](const JetPoint& y) { return 1.0 + 0.2 * cos(y[0] + y[3]); });
  BallDomain ball = BallDomain::make(3.0, {}, 8, 8, 16);
  ScalarField b = exact_source(u, h);
  PohozaevReport good = pohozaev_balance(u, h, b, ball);
  CHECK(std::abs(good.residual) <= 5 * good.error_estimate);

  ScalarField perturbed = ScalarField::analytic([u](const JetPoint& y) {
    Jet r2 = y[0] * y[0] + y[1] * y[1] + y[2] * y[2] + y[3] * y[3];
    return u.jet_fn()(y) + 0.2 * exp(-r2) * y[0];
  });
  PohozaevReport bad = pohozaev_balance(perturbed, h, b, ball);
  CHECK(std::abs(bad.residual) >= 10 * 5 * good.error_estimate);
}

TEST_CASE("curved balance with the exact source") {
  std::mt19937_64 rng(17);
  CurvatureJet jet = random_conformal_normal_jet(rng);
  CurvedMetric cm{metric_taylor_from_jet(jet), 0.01, 3.0};
  RescaledBubble rb(1.0);
  ScalarField u = ScalarField::analytic([rb](const JetPoint& y) {
    return rb.eval(y, {0.3, -0.2, 0.1, 0.25}) + 0.05 * y[0] * y[1];
  });
  BallDomain ball = BallDomain::make(2.0, {}, 5, 4, 8, 3);
  PohozaevReport rep = pohozaev_balance(u, kOne, exact_source(u, kOne, cm), ball, cm);
  CHECK(rep.curved);
  CHECK(std::abs(rep.residual) <= 5 * rep.error_estimate);
  CHECK(rep.unmodeled_remainder > 0.0);
  CHECK(rep.i3 != 0.0);
  CHECK(rep.i4 != 0.0);

  CHECK_THROWS_AS(pohozaev_balance(u, kOne, kZero, BallDomain::make(4.0), cm), std::out_of_range);
  CHECK_THROWS_AS(pohozaev_balance(u, kOne, kZero, BallDomain::make(1.0, {0.5, 0, 0, 0}), cm), std::invalid_argument);
}

TEST_CASE("curvature terms decrease linearly in the metric amplitude") {
  std::mt19937_64 rng(3);
  CurvatureJet jet = random_conformal_normal_jet(rng);
  MetricTaylor mt = metric_taylor_from_jet(jet);
  RescaledBubble rb(1.0);
  ScalarField u = ScalarField::analytic([rb](const JetPoint& y) {
    return rb.eval(y, {0.3, -0.2, 0.1, 0.25}) + 0.05 * (y[0] * y[1] - 0.5 * y[2] * y[2]);
  });
  BallDomain ball = BallDomain::make(2.0, {}, 5, 4, 8, 3);
  std::vector<double> sums;
  for (double eps : {2.5e-3, 6.25e-4}) {
    PohozaevReport r = pohozaev_balance(u, kOne, kZero, ball, CurvedMetric{mt, eps, 3.0});
    sums.push_back(std::abs(r.i2) + std::abs(r.i3) + std::abs(r.i4));
  }
  CHECK(std::abs(std::log(sums[0] / sums[1]) / std::log(4.0) - 1.0) <= 0.3);
}

TEST_CASE("energy balance of the exact bubble") {
  RescaledBubble rb(1.0);
  EnergyBalance e = energy_balance(rb.field(), kOne, {5.0, 10.0, 20.0, 40.0});
  // Reference differences from symbolic radial derivatives and extended-precision quadrature.
  const double expect[4] = {3.0982376445049151, 0.140536120339681, 0.0029608390809991107, 4.9971534371249212e-5};
  for (int k = 0; k < 4; ++k) CHECK(e.difference[k] == doctest::Approx(expect[k]).epsilon(1e-6));
  CHECK(e.decay_exponent < -4.0);
  CHECK(e.alpha.back() == doctest::Approx(mass_integral(rb, 40.0)).epsilon(1e-10));
}

TEST_CASE("alpha depends only on h e^{4u}") {
  RescaledBubble rb(1.0);
  const double shift = -std::log(2.0) / 4;
  ScalarField shifted = ScalarField::analytic([rb, shift](const JetPoint& y) { return rb.eval(y) + shift; });
  EnergyBalance a = energy_balance(rb.field(), kOne, {3.0, 6.0});
  EnergyBalance b = energy_balance(shifted, ScalarField::constant(2.0), {3.0, 6.0});
  for (int k = 0; k < 2; ++k) CHECK(b.alpha[k] == doctest::Approx(a.alpha[k]).epsilon(1e-14));
}

TEST_CASE("flat boundary functional") {
  RescaledBubble rb(1.0);
  BallDomain ball = BallDomain::make(4.0);
  for (double v : flat_boundary_functional(rb.field(), ball)) CHECK(std::abs(v) < 1e-10);

  ScalarField even = ScalarField::analytic([rb](const JetPoint& y) { return rb.eval(y) + 0.1 * y[0] * y[1] + 0.05 * y[2] * y[2]; });
  for (double v : flat_boundary_functional(even, ball)) CHECK(std::abs(v) < 1e-9);

  const double beta = 1e-3, r = 4.0;
  ScalarField tilt = ScalarField::analytic([rb, beta](const JetPoint& y) { return rb.eval(y) + beta * y[0]; });
  auto f = flat_boundary_functional(tilt, ball);
  // Odd terms integrate to zero, leaving -beta times the flux of grad(Delta U).
  const double expect = -beta * 2 * kPi * kPi * std::pow(r, 3) * rb.d_r_laplacian(r);
  CHECK(f[0] == doctest::Approx(expect).epsilon(0.05));
  CHECK(std::abs(f[1]) < 1e-10);
}

TEST_CASE("vanishing-rate balance") {
  auto zero = vanishing_rate_balance(ScalarField::constant(2.0), ScalarField::constant(-1.0));
  for (double v : zero) CHECK(v == 0.0);
  ScalarField h = ScalarField::analytic([](const JetPoint& x) { return 2.0 + 0.3 * sin(x[0]) - 0.1 * x[2]; });
  // grad h(0) / h(0) = (0.15, 0, -0.05, 0).
  ScalarField phi = ScalarField::analytic([](const JetPoint& x) { return -0.0375 * x[0] + 0.0125 * x[2] + x[1] * x[1]; });
  for (double v : vanishing_rate_balance(h, phi)) CHECK(std::abs(v) < 1e-15);
  CHECK_THROWS_AS(vanishing_rate_balance(ScalarField::constant(-1.0), phi), std::domain_error);
}

TEST_CASE("radial third derivative") {
  RadialProfile quad = [](double r) { return std::array<double, 4>{r * r, 2 * r, 2.0, 0.0}; };
  for (int i = 0; i < 4; ++i) CHECK(std::abs(radial_third_derivative(quad, {0.3, -0.2, 0.5, 0.1}, i, 1, 2).corrected) < 1e-14);

  // Reference third partials of log(1 + |y|^2) from symbolic differentiation.
  struct Case {
    Point y;
    int i, m, l;
    double value;
  };
  const Point g{0.3, -0.5, 0.7, 0.2};
  const Case cases[] = {{{1, 0, 0, 0}, 0, 0, 0, -1.0},
                        {{1, 0, 0, 0}, 0, 1, 1, -1.0},
                        {{1, 0, 0, 0}, 1, 0, 1, -1.0},
                        {{1, 0, 0, 0}, 0, 1, 2, 0.0},
                        {g, 0, 0, 0, -0.96342015991857111639},
                        {g, 0, 1, 1, -0.15965248364364892786},
                        {g, 1, 0, 1, -0.15965248364364892786},
                        {g, 0, 1, 2, -0.25691204264495229770},
                        {g, 2, 2, 1, -0.027526290283387746183}};
  for (const auto& c : cases) {
    RadialThirdDerivative d = radial_third_derivative(log_profile(), c.y, c.i, c.m, c.l);
    CHECK(d.corrected == doctest::Approx(c.value).epsilon(1e-12).scale(1.0));
    CHECK(d.corrected_matches);
    CHECK(std::abs(d.finite_difference - c.value) < 1e-6);
  }
  // The displayed grouping differs exactly when delta_ml y_i is present and f'' - f' differs from f'' - f'/r.
  RadialThirdDerivative d = radial_third_derivative(log_profile(), g, 0, 1, 1);
  CHECK_FALSE(d.displayed_matches);
  CHECK(d.matching() == "corrected");

  // Contracting m = l gives d_i of the radial Laplacian.
  const Point y{0.4, 0.1, -0.6, 0.3};
  const double r = std::sqrt(0.16 + 0.01 + 0.36 + 0.09);
  auto v = log_profile()(r);
  const double d_lap = v[3] + 3 * v[2] / r - 3 * v[1] / (r * r);
  for (int i = 0; i < 4; ++i) {
    double s = 0;
    for (int m = 0; m < 4; ++m) s += radial_third_derivative(log_profile(), y, i, m, m).corrected;
    CHECK(s == doctest::Approx(d_lap * y[i] / r).epsilon(1e-12));
  }
  CHECK_THROWS_AS(radial_third_derivative(log_profile(), {0, 0, 0, 0}, 0, 0, 0), std::invalid_argument);
}

TEST_CASE("reports serialise") {
  RescaledBubble rb(1.0);
  PohozaevReport rep = pohozaev_balance(rb.field(), kOne, kZero, BallDomain::make(2.0));
  CHECK(PohozaevReport::csv_header() == "parameter,I0,I1,I2,I3,I4,residual,error_estimate");
  CHECK(rep.csv_row(2.0).rfind("2,", 0) == 0);
  CHECK(rep.to_json().find("\"I0\"") != std::string::npos);
}
