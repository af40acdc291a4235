#include <doctest.h>

#include <random>
#include <sstream>

#include "qlab/cnc.hpp"

using namespace qlab;

namespace {

// (K/3)(y_a y_b - delta_ab |y|^2) as an exact polynomial matrix.
PolyMatrix constant_curvature_quadratic(const Rational& k) {
  PolyMatrix m;
  for (int a = 0; a < kDim; ++a)
    for (int b = 0; b < kDim; ++b) {
      m[a][b] = ExactPoly(3);
      MultiIndex ab{};
      ab[a] += 1;
      ab[b] += 1;
      m[a][b].add_term(ab, k / 3);
      if (a == b)
        for (int c = 0; c < kDim; ++c) {
          MultiIndex cc{};
          cc[c] = 2;
          m[a][b].add_term(cc, -k / 3);
        }
    }
  return m;
}

bool is_zero(const PolyMatrix& m) {
  for (const auto& row : m)
    for (const auto& p : row)
      if (!p.is_zero()) return false;
  return true;
}

IdentityStatus status(const std::vector<IdentityCheck>& suite, const std::string& name) {
  for (const auto& c : suite)
    if (c.name == name) return c.status;
  FAIL("missing identity " << name);
  return IdentityStatus::not_checkable;
}

}  // namespace

TEST_CASE("rational parsing") {
  CHECK(parse_rational("3") == 3);
  CHECK(parse_rational("-2/6") == Rational(-1, 3));
  CHECK(parse_rational("-1.25e-3") == Rational(-1, 800));
  CHECK(parse_rational("0.1") == Rational(1, 10));
  CHECK_THROWS(parse_rational("1/0"));
  CHECK_THROWS(parse_rational("abc"));
}

TEST_CASE("zero jet gives the identity metric") {
  MetricTaylor mt = metric_taylor_from_jet(CurvatureJet{});
  CHECK(mt.coeffs == identity_poly_matrix(3));
  MetricTaylor inv = inverse_metric_taylor(mt);
  CHECK(inv.coeffs == identity_poly_matrix(3));
  for (const auto& c : cnc_identity_suite(CurvatureJet{})) CHECK(c.status != IdentityStatus::fail);
}

TEST_CASE("constant curvature expansion") {
  const Rational k(2, 5);
  CurvatureJet jet = CurvatureJet::constant_curvature(k);
  CHECK(jet.r0(0, 1, 0, 1) == k);
  CHECK(jet.r0(0, 1, 1, 0) == -k);
  MetricTaylor mt = metric_taylor_from_jet(jet);
  MetricTaylor inv = inverse_metric_taylor(mt);
  PolyMatrix quad = constant_curvature_quadratic(k);
  for (int a = 0; a < kDim; ++a)
    for (int b = 0; b < kDim; ++b) {
      CHECK(mt(a, b).homogeneous_part(2) == quad[a][b]);
      CHECK(inv(a, b).homogeneous_part(2) == quad[a][b] * Rational(-1));
    }
  CHECK(jet.ricci0(0, 0) == 3 * k);
  CHECK(weyl_projection(std::vector<Rational>(256, 0)) == std::vector<Rational>(256, 0));
  std::vector<Rational> r(256);
  for (int i = 0; i < 256; ++i) r[i] = jet.r0(i / 64, i / 16 % 4, i / 4 % 4, i % 4);
  for (const auto& w : weyl_projection(r)) CHECK(w == 0);
  // Conformal-normal preconditions fail for a curved round sphere.
  CurvatureJet flagged = jet;
  flagged.set_conformal_normal(true);
  CHECK(status(cnc_identity_suite(flagged), "ricci_vanishes") == IdentityStatus::fail);
  CHECK_THROWS_AS(flagged.validate(), std::invalid_argument);
}

TEST_CASE("random conformal-normal jets satisfy every identity exactly") {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 5; ++trial) {
    CurvatureJet jet = random_conformal_normal_jet(rng);
    CHECK(jet.conformal_normal());
    CHECK_NOTHROW(jet.validate());
    CHECK(jet.symmetry_defect() == 0.0);
    for (int b = 0; b < kDim; ++b)
      for (int d = 0; d < kDim; ++d) CHECK(jet.ricci0(b, d) == 0);
    for (const auto& c : cnc_identity_suite(jet)) CHECK_MESSAGE(c.status != IdentityStatus::fail, c.name);

    MetricTaylor mt = metric_taylor_from_jet(jet);
    MetricTaylor inv = inverse_metric_taylor(mt);
    CHECK(is_zero(inverse_product_residual(mt, inv)));
    ExactPoly ld = log_det(mt);
    for (int deg = 0; deg <= 2; ++deg) CHECK(ld.homogeneous_part(deg).is_zero());
    CHECK(d_inverse_metric(inv) == d_inverse_metric_closed_form(jet));
    CHECK(dd_inverse_metric(inv) == dd_inverse_metric_closed_form(jet));
    CHECK(contracted_first_derivative(inv) == contracted_first_derivative_closed_form(jet));
    CHECK(contracted_second_derivative(inv) == contracted_second_derivative_closed_form(jet));
  }
}

TEST_CASE("formal derivative of the inverse matches centred differences of the polynomial") {
  std::mt19937_64 rng(8);
  CurvatureJet jet = random_conformal_normal_jet(rng);
  MetricTaylor inv = inverse_metric_taylor(metric_taylor_from_jet(jet));
  PolyArray3 d = d_inverse_metric(inv);
  const Point x{0.2, -0.1, 0.3, 0.15};
  const double h = 1e-4;
  // d g^{ab} / d x^c through degree 2 equals the derivative of the degree-3 truncation.
  for (int c = 0; c < kDim; ++c)
    for (int a = 0; a < kDim; ++a)
      for (int b = 0; b < kDim; ++b) {
        Point p = x, m = x;
        p[c] += h;
        m[c] -= h;
        const ExactPoly& g = inv(a, b);
        double fd = (g.eval(p) - g.eval(m)) / (2 * h);
        CHECK(std::abs(d[c][a][b].eval(x) - fd) < 1e-7);
      }
}

TEST_CASE("jets without Ricci derivative make the contracted first derivative vanish") {
  std::mt19937_64 rng(4);
  CurvatureJet jet = random_jet_without_ricci_derivative(rng);
  jet.set_conformal_normal(true);
  for (int b = 0; b < kDim; ++b)
    for (int d = 0; d < kDim; ++d)
      for (int e = 0; e < kDim; ++e) CHECK(jet.ricci1(b, d, e) == 0);
  for (const auto& p : contracted_first_derivative(inverse_metric_taylor(metric_taylor_from_jet(jet))))
    CHECK(p.is_zero());
}

TEST_CASE("a scalar-gradient violation is isolated") {
  std::mt19937_64 rng(5);
  CurvatureJet good = random_conformal_normal_jet(rng);
  CurvatureJet bad = with_scalar_gradient(good, {Rational(1), Rational(0), Rational(-2, 3), Rational(0)});
  auto suite = cnc_identity_suite(bad);
  CHECK(status(suite, "scalar_gradient") == IdentityStatus::fail);
  CHECK(status(suite, "ricci_vanishes") == IdentityStatus::pass);
  CHECK(status(suite, "symmetrized_ricci_derivative") == IdentityStatus::pass);
  CHECK(bad.scalar_gradient(0) != 0);
}

TEST_CASE("contracted second derivative requires the flag") {
  CurvatureJet jet = CurvatureJet::constant_curvature(Rational(0));
  CHECK_THROWS_AS(contracted_first_derivative(metric_taylor_from_jet(jet)), std::invalid_argument);
  jet.set_conformal_normal(true);
  for (const auto& row : contracted_second_derivative(inverse_metric_taylor(metric_taylor_from_jet(jet))))
    for (const auto& p : row) CHECK(p.is_zero());
}

TEST_CASE("text format round trip and diagnostics") {
  std::mt19937_64 rng(12);
  CurvatureJet jet = random_conformal_normal_jet(rng);
  std::stringstream ss;
  jet.save(ss);
  CurvatureJet back = CurvatureJet::load(ss);
  CHECK(back.conformal_normal());
  for (int i = 0; i < 256; ++i) CHECK(back.r0(i / 64, i / 16 % 4, i / 4 % 4, i % 4) == jet.r0(i / 64, i / 16 % 4, i / 4 % 4, i % 4));
  for (int i = 0; i < 1024; ++i)
    CHECK(back.r1(i / 256, i / 64 % 4, i / 16 % 4, i / 4 % 4, i % 4) ==
          jet.r1(i / 256, i / 64 % 4, i / 16 % 4, i / 4 % 4, i % 4));

  std::istringstream images("R 1 2 1 2 1/3  # comment\n\nR 2 1 2 1 1/3\n");
  CurvatureJet sym = CurvatureJet::load(images);
  CHECK(sym.r0(1, 0, 0, 1) == Rational(-1, 3));
  std::istringstream conflict("R 1 2 1 2 1\nR 2 1 1 2 1\n");
  CHECK_THROWS_AS(CurvatureJet::load(conflict), std::invalid_argument);
  std::istringstream diagonal("R 1 1 2 3 1\n");
  CHECK_THROWS_AS(CurvatureJet::load(diagonal), std::invalid_argument);
  std::istringstream range("R 1 5 2 3 1\n");
  CHECK_THROWS_AS(CurvatureJet::load(range), std::invalid_argument);
  std::istringstream tag("Q 1 2 1 2 1\n");
  CHECK_THROWS_AS(CurvatureJet::load(tag), std::invalid_argument);
  CHECK_THROWS_AS(CurvatureJet::load_file("/nonexistent/jet.txt"), std::runtime_error);
}

TEST_CASE("blow-up scales each order by its power of eps") {
  std::mt19937_64 rng(2);
  CurvatureJet jet = random_conformal_normal_jet(rng);
  CurvatureJet b = jet.blow_up(Rational(1, 10));
  CHECK(b.r0(0, 1, 2, 3) == jet.r0(0, 1, 2, 3) / 100);
  CHECK(b.r1(0, 1, 0, 2, 3) == jet.r1(0, 1, 0, 2, 3) / 1000);
  CHECK(jet.scaled(Rational(2)).r1(0, 1, 0, 2, 3) == 2 * jet.r1(0, 1, 0, 2, 3));
}

TEST_CASE("expansion Laplacian") {
  const ScalarField u = ScalarField::analytic(
      [](const JetPoint& x) { return 0.5 * x[0] * x[0] - 0.2 * x[1] * x[2] + 0.3 * x[3] * x[3] + sin(x[0] * x[1]); });
  MetricTaylor flat = metric_taylor_from_jet(CurvatureJet{});
  const Point x{0.3, 0.2, -0.1, 0.4};
  Jet j = u.jet(x, 2);
  double lap = j.partial({2, 0, 0, 0}) + j.partial({0, 2, 0, 0}) + j.partial({0, 0, 2, 0}) + j.partial({0, 0, 0, 2});
  CHECK(detone_laplacian(flat, u, x) == doctest::Approx(lap));

  std::mt19937_64 rng(6);
  MetricTaylor mt = metric_taylor_from_jet(random_conformal_normal_jet(rng));
  const ScalarField q = ScalarField::analytic([](const JetPoint& y) { return 0.5 * y[0] * y[0] - y[1] * y[2] + 2.0 * y[3] * y[3]; });
  CHECK(detone_laplacian(mt, q, {0, 0, 0, 0}) == doctest::Approx(5.0).epsilon(1e-15));
}

TEST_CASE("expansion printout is stable") {
  CurvatureJet jet;
  jet.set_r0(0, 1, 0, 1, Rational(3));
  jet.set_r0(1, 0, 1, 0, Rational(3));
  jet.set_r0(0, 1, 1, 0, Rational(-3));
  jet.set_r0(1, 0, 0, 1, Rational(-3));
  MetricTaylor mt = metric_taylor_from_jet(jet);
  // g_11 = 1 - (1/3) R_{1212} y2^2.
  CHECK(mt(0, 0).to_string() == "1 - x2^2 + O(r^4)");
  CHECK(mt(0, 1).to_string() == "x1*x2 + O(r^4)");
}
