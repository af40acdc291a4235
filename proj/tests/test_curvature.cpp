#include <doctest.h>

#include <cmath>
#include <numbers>

#include "qlab/curvature.hpp"

using namespace qlab;
constexpr double kPi = std::numbers::pi;

namespace {

ScalarField sphere_factor() {
  return ScalarField::analytic([](const JetPoint& x) {
    Jet r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2] + x[3] * x[3];
    return std::log(2.0) - log(1.0 + r2);
  });
}

MetricField wavy() {
  return MetricField::analytic([](const JetPoint& x) {
    const int order = x[0].order();
    MetricJet m;
    for (int i = 0; i < kDim; ++i)
      for (int j = 0; j < kDim; ++j) m[i][j] = Jet::constant(i == j ? 1.0 : 0.0, order);
    m[0][0] += 0.2 * sin(x[1] + 0.3 * x[2]);
    m[1][1] += 0.1 * x[0] * x[3];
    m[0][2] += 0.1 * cos(x[3]);
    m[2][0] = m[0][2];
    m[2][3] += 0.05 * x[1] * x[1];
    m[3][2] = m[2][3];
    return m;
  });
}

const ScalarField kShift = ScalarField::analytic([](const JetPoint& x) { return 0.2 * x[0] + 0.1 * x[1] * x[1]; });
const ScalarField kProbe =
    ScalarField::analytic([](const JetPoint& x) { return cos(0.7 * x[0] - x[3]) + 0.2 * x[1] * x[1]; });

}  // namespace

TEST_CASE("round sphere curvature") {
  MetricField s = MetricField::conformally_flat(sphere_factor());
  for (const Point& x : {Point{0, 0, 0, 0}, Point{0.4, -0.3, 0.2, 0.6}}) {
    RiemannAtPoint r = riemann_of_metric(s, x);
    CHECK(r.scalar() == doctest::Approx(12.0).epsilon(1e-12));
    CHECK(r.ricci_norm_sq() == doctest::Approx(36.0).epsilon(1e-12));
    CHECK(r.symmetry_defect() < 1e-12);
    CHECK((r.ricci() - 3.0 * r.g).cwiseAbs().maxCoeff() < 1e-12);
    // Constant sectional curvature one.
    CHECK(r(0, 1, 0, 1) == doctest::Approx(r.g(0, 0) * r.g(1, 1) - r.g(0, 1) * r.g(0, 1)).epsilon(1e-12));
    CHECK(q_curvature(s, x) == doctest::Approx(3.0).epsilon(1e-12));
    Tensor4 w = weyl_tensor(r, r.g);
    CHECK(full_norm_sq(w, r.g_inv) < 1e-20);
  }
}

TEST_CASE("flat metric has no curvature") {
  MetricField f = MetricField::flat();
  RiemannAtPoint r = riemann_of_metric(f, {0.1, 0.2, 0.3, 0.4});
  for (double v : r.R) CHECK(v == 0.0);
  CHECK(q_curvature(f, {0.1, 0.2, 0.3, 0.4}) == 0.0);
}

TEST_CASE("Weyl tensor of a generic metric is trace free") {
  RiemannAtPoint r = riemann_of_metric(wavy(), {0.3, -0.2, 0.1, 0.5});
  Tensor4 w = weyl_tensor(r, r.g);
  CHECK(max_trace(w, r.g_inv) < 1e-12);
  CHECK(full_norm_sq(w, r.g_inv) > 1e-6);
  RiemannAtPoint broken = r;
  broken.R[idx4(0, 1, 2, 3)] += 1e-3;
  CHECK_THROWS_AS(weyl_tensor(broken, broken.g), std::invalid_argument);
}

TEST_CASE("covariant derivative of curvature obeys the second Bianchi identity") {
  RiemannJetAtPoint rj = riemann_with_derivative(wavy(), {0.2, 0.1, -0.3, 0.4});
  double worst = 0;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int c = 0; c < 4; ++c)
        for (int d = 0; d < 4; ++d)
          for (int e = 0; e < 4; ++e)
            worst = std::max(worst, std::abs(rj.nabla[idx5(a, b, c, d, e)] + rj.nabla[idx5(a, b, d, e, c)] +
                                             rj.nabla[idx5(a, b, e, c, d)]));
  CHECK(worst < 1e-11);
}

TEST_CASE("Paneitz operator on a conformally flat metric") {
  // Reference values from a symbolic computation at the same point.
  const Point x{0.3, -0.2, 0.1, 0.5};
  const ScalarField w = ScalarField::analytic([](const JetPoint& y) { return y[0] / 5.0 + y[1] * y[1] / 10.0; });
  const double value = paneitz_apply(MetricField::conformally_flat(w), kProbe, x);
  CHECK(value == doctest::Approx(1.6469074785070172962).epsilon(1e-12));
  // The sign-flipped lower-order term gives 2.8337182416731414198.
  CHECK(std::abs(value - 2.8337182416731414198) > 1.0);
}

TEST_CASE("Paneitz operator on the sphere is Delta^2 - 2 Delta") {
  MetricField s = MetricField::conformally_flat(sphere_factor());
  const Point x{0.2, 0.1, -0.3, 0.25};
  GeometryJet geo = geometry_jet(s, x, 4);
  Jet f = kProbe.jet(x, 4);
  double lap = laplacian(geo, f).value();
  double bilap = laplacian(geometry_jet(s, x, 2), laplacian(geo, f)).value();
  CHECK(paneitz_apply(s, kProbe, x) == doctest::Approx(bilap - 2.0 * lap).epsilon(1e-11));
}

TEST_CASE("conformal covariance and Q transformation") {
  const std::vector<Point> pts{{0.3, -0.2, 0.1, 0.5}, {-0.4, 0.1, 0.2, 0.0}};
  CHECK(check_conformal_covariance(wavy(), kShift, kProbe, pts).max_deviation < 1e-10);
  CHECK(check_q_transformation(wavy(), kShift, pts).max_deviation < 1e-10);
  MetricField s = MetricField::conformally_flat(sphere_factor());
  CHECK(check_q_transformation(MetricField::flat(), sphere_factor(), pts).max_deviation < 1e-12);
  CHECK(check_conformal_covariance(s, kShift, kProbe, pts).max_deviation < 1e-10);
}

TEST_CASE("covariance deviation of sampled metrics shrinks at fourth order") {
  const MetricField g = wavy();
  const std::vector<Point> pts{{0.3, -0.2, 0.1, 0.5}};
  std::vector<double> dev;
  for (double h : {0.2, 0.1, 0.05}) {
    auto gs = MetricField::sampled([g](const Point& x) { return g(x); }, Box::cube(2.0), h);
    DeviationReport r = check_conformal_covariance(gs, kShift, kProbe, pts);
    CHECK(r.derivative_mode == to_string(DerivativeMode::finite_difference));
    dev.push_back(r.max_deviation);
  }
  const double order = std::log(dev[0] / dev[2]) / std::log(4.0);
  CHECK(std::abs(order - 4.0) < 0.5);
}

TEST_CASE("conformal transform multiplies the metric") {
  MetricField g = conformal_transform(wavy(), kShift);
  const Point x{0.1, 0.4, -0.2, 0.3};
  CHECK((g(x) - std::exp(2 * kShift(x)) * wavy()(x)).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("Gauss-Bonnet integrals") {
  GaussBonnetReport sphere = gauss_bonnet_check(sphere_chart_model(10, 5, 8));
  CHECK(sphere.volume == doctest::Approx(8 * kPi * kPi / 3).epsilon(1e-6));
  CHECK(sphere.total == doctest::Approx(8 * kPi * kPi).epsilon(0.01));
  CHECK(std::abs(sphere.weyl_integral) < 1e-8);

  GaussBonnetReport torus = gauss_bonnet_check(flat_torus_model(1.0, 3));
  CHECK(torus.total == 0.0);
  CHECK(torus.volume == doctest::Approx(1.0));

  ScalarField bump = ScalarField::analytic([](const JetPoint& x) {
    Jet r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2] + x[3] * x[3];
    return 0.1 * exp(-r2 * 4.0) * x[0];
  });
  GaussBonnetReport perturbed = gauss_bonnet_check(sphere_chart_model(10, 5, 8, &bump));
  CHECK(perturbed.total == doctest::Approx(8 * kPi * kPi).epsilon(0.01));
}
