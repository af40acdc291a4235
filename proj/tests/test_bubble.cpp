#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "qlab/bubble.hpp"

using namespace qlab;
constexpr double kPi = std::numbers::pi;
const double kFullMass = 16 * kPi * kPi;

TEST_CASE("bubble values at the centre and the rescaling identity") {
  CHECK(bubble_eval(BubbleParams{{}, 0.01, 1.0}, 0.0) == doctest::Approx(-std::log(0.01)));
  CHECK(bubble_eval(BubbleParams{{}, 1.0, 1.0}, 0.0) == 0.0);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int k = 0; k < 20; ++k) {
    BubbleParams b{{}, std::pow(10.0, -5 * unit(rng)), 0.5 + 1.5 * unit(rng)};
    double d = 3 * unit(rng);
    double a = bubble_eval(b, d), r = bubble_eval_rescaled(b, d);
    CHECK(std::abs(a - r) <= 1e-14 * std::max(1.0, std::abs(a)));
  }
}

TEST_CASE("bubble parameters are validated") {
  CHECK_THROWS_AS(BubbleParams({{}, 0.0, 1.0}).validate(), std::invalid_argument);
  CHECK_THROWS_AS(BubbleParams({{}, 0.1, 1e-4}).validate(), std::invalid_argument);
  CHECK_NOTHROW(BubbleParams({{}, 0.1, 1e-3}).validate());
}

TEST_CASE("bilaplacian of the bubble at the origin is 2H") {
  for (double h : {0.5, 1.0, 2.0}) {
    RescaledBubble rb(h);
    CHECK(rb.rho() * rb.rho() == doctest::Approx(h / 48));
    CHECK(bilaplacian(rb.eval(jet_point({0, 0, 0, 0}, 4))) == doctest::Approx(2 * h).epsilon(1e-13));
    CHECK(rb.bilaplacian(0.0) == doctest::Approx(2 * h).epsilon(1e-13));
  }
}

TEST_CASE("bubble equation holds at random points") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  for (int k = 0; k < 2000; ++k) {
    RescaledBubble rb(1.25 + 0.75 * unit(rng));
    Point y{50 * unit(rng) / 2, 50 * unit(rng) / 2, 50 * unit(rng) / 2, 50 * unit(rng) / 2};
    CHECK(std::abs(bubble_pde_residual(rb, y)) <= 1e-10);
  }
  CHECK(std::abs(bubble_pde_residual(RescaledBubble(1.0), {10, 0, 0, 0})) <= 1e-10);
}

TEST_CASE("radial closed forms agree with Cartesian jets") {
  RescaledBubble rb(1.7);
  for (double r : {0.3, 2.0, 11.0}) {
    Jet j = rb.eval(jet_point({r, 0, 0, 0}, 4));
    CHECK(j.value() == doctest::Approx(rb.value(r)));
    CHECK(j.partial({1, 0, 0, 0}) == doctest::Approx(rb.d_r(r)));
    CHECK(flat_laplacian(j) == doctest::Approx(rb.laplacian(r)));
    CHECK(bilaplacian(j) == doctest::Approx(rb.bilaplacian(r)));
  }
}

TEST_CASE("kernel elements solve the linearized equation") {
  const double rho = bubble_rho(1.0);
  Jet psi0 = KernelElement{0, rho}.eval(jet_point({0, 0, 0, 0}, 4));
  CHECK(psi0.value() == doctest::Approx(1.0));
  CHECK(bilaplacian(psi0) == doctest::Approx(8.0).epsilon(1e-12));
  Jet psi1 = KernelElement{1, rho}.eval(jet_point({0, 0, 0, 0}, 4));
  CHECK(psi1.value() == 0.0);
  CHECK(std::abs(bilaplacian(psi1)) < 1e-14);
  CHECK(std::abs(linearized_residual(KernelElement{0, rho}, {5, 0, 0, 0})) <= 1e-8);
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> unit(-20.0, 20.0);
  for (int k = 0; k < 200; ++k) {
    Point y{unit(rng), unit(rng), unit(rng), unit(rng)};
    for (int j = 0; j < 5; ++j) CHECK(std::abs(linearized_residual(KernelElement{j, rho}, y)) <= 1e-8);
  }
}

TEST_CASE("mass integral") {
  RescaledBubble rb(1.0);
  CHECK(mass_integral(rb, 0.0) == 0.0);
  // Frozen from an independent extended-precision quadrature.
  CHECK(mass_integral(rb, 10.0) == doctest::Approx(156.01074855892983812).epsilon(1e-12));
  CHECK(mass_integral(rb, 1e5) == doctest::Approx(kFullMass).epsilon(1e-12));
  double prev = 0;
  std::vector<double> lr, ld;
  for (double r : {10.0, 20.0, 40.0, 80.0}) {
    double m = mass_integral(rb, r);
    CHECK(m > prev);
    prev = m;
    lr.push_back(std::log(r));
    ld.push_back(std::log(kFullMass - m));
  }
  double slope = (ld.back() - ld.front()) / (lr.back() - lr.front());
  CHECK(slope == doctest::Approx(-4.0).epsilon(0.05));
}

TEST_CASE("perturbed Paneitz residual") {
  RescaledBubble rb(1.0);
  std::mt19937_64 rng(1);
  CurvatureJet jet = random_conformal_normal_jet(rng);
  const Point y{0.3, -0.15, 0.25, 0.1};
  CHECK(std::abs(perturbed_paneitz_residual(rb, jet, 0.0, y)) <= 1e-10);
  CHECK(std::abs(perturbed_paneitz_residual(rb, CurvatureJet{}, 0.1, y)) <= 1e-10);
  CHECK_THROWS_AS(perturbed_paneitz_residual(rb, jet, 0.1, {10, 0, 0, 0}, 0.5), std::out_of_range);

  for (int seed = 1; seed <= 4; ++seed) {
    std::mt19937_64 r(seed);
    CurvatureJet j = random_conformal_normal_jet(r);
    double a = std::abs(perturbed_paneitz_residual(rb, j, 0.1, y, 3.0));
    double c = std::abs(perturbed_paneitz_residual(rb, j, 0.025, y, 3.0));
    double slope = (std::log(a) - std::log(c)) / std::log(4.0);
    CHECK(std::abs(slope - 4.0) <= 0.3);
  }
}

TEST_CASE("barrier") {
  RescaledBubble rb(1.0);
  SUBCASE("exact bubble needs no barrier") {
    BarrierResult r = barrier_check(rb.field(), rb, 2.0, 20.0, 10.0);
    CHECK(r.admissible);
    CHECK(r.minimal_c < 1e-10);
  }
  SUBCASE("inverse cube perturbation") {
    // Delta |y|^{-3} = 3 |y|^{-5} and Delta T = -C |y|^{-3}, so C >= 3 c / inner^2.
    const double c = 0.5, inner = 2.0;
    ScalarField v = ScalarField::analytic([rb, c](const JetPoint& y) {
      Jet r2 = y[0] * y[0] + y[1] * y[1] + y[2] * y[2] + y[3] * y[3];
      return rb.eval(y) + c * pow(r2, -1.5);
    });
    BarrierResult r = barrier_check(v, rb, inner, 20.0, 10.0);
    CHECK(r.admissible);
    CHECK(r.minimal_c == doctest::Approx(3 * c / (inner * inner)).epsilon(1e-6));
  }
  SUBCASE("slowly decaying perturbation has no barrier") {
    ScalarField v = ScalarField::analytic([rb](const JetPoint& y) {
      Jet r2 = y[0] * y[0] + y[1] * y[1] + y[2] * y[2] + y[3] * y[3];
      return rb.eval(y) + log(1.0 + sqrt(r2));
    });
    CHECK_FALSE(barrier_check(v, rb, 2.0, 200.0, 10.0).admissible);
  }
}

TEST_CASE("weighted sup-norm") {
  const BubbleParams b{{}, 1e-3, 1.0};
  const double tau = 0.5;
  RescaledBubble rb(1.0);
  auto bubble = [b, rb](const JetPoint& x) {
    JetPoint y = x;
    for (auto& t : y) t = t / b.eps;
    return rb.eval(y) - std::log(b.eps);
  };
  CHECK(weighted_sup_norm(ScalarField::analytic(bubble), b, tau, 1.0).sup < 1e-10);

  const double a = 0.3;
  ScalarField power = ScalarField::analytic([bubble, a, tau](const JetPoint& x) {
    Jet r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2] + x[3] * x[3];
    return bubble(x) + a * pow(r2, tau / 2);
  });
  WeightedNorm wp = weighted_sup_norm(power, b, tau, 1.0);
  CHECK(wp.sup == doctest::Approx(a).epsilon(0.02));
  CHECK_FALSE(wp.peaks_at_core);

  const double c = 0.2;
  ScalarField shifted = ScalarField::analytic([bubble, c](const JetPoint& x) { return bubble(x) + c; });
  WeightedNorm ws = weighted_sup_norm(shifted, b, tau, 1.0);
  CHECK(ws.peaks_at_core);
  CHECK(ws.sup == doctest::Approx(c / std::pow(b.eps, tau)).epsilon(1e-6));

  CHECK_THROWS_AS(weighted_sup_norm(shifted, b, 1.0, 1.0), std::invalid_argument);
}
