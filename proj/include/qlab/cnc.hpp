#pragma once

// Metric expansions in (conformal) normal coordinates from curvature jets at
// the origin, in exact rational arithmetic.
//
// Index conventions match curvature.hpp: R_{abcd} with Ric_{bd} = sum_a R_{abad}.
// Indices are 0-based in the API and 1-based in the text format.
//
// Jet text format, one entry per line ('#' starts a comment):
//   conformal_normal                 sets the conformal-normal flag
//   R   a b c d value                R_{abcd}(0)
//   DR  a b c d e value              R_{abcd,e}(0)
//   DDR a b c d e f value            R_{abcd,ef}(0)
// with a..f in 1..4 and value an integer, a fraction p/q, or a decimal such
// as -1.25e-3 (read exactly). Each entry also sets the images under
// R_{abcd} = -R_{bacd} = -R_{abdc} = R_{cdab}; conflicting images are an error.

#include <iosfwd>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "qlab/curvature.hpp"
#include "qlab/exact_poly.hpp"

namespace qlab {

Rational parse_rational(const std::string& text);

class CurvatureJet {
public:
  CurvatureJet();

  static CurvatureJet constant_curvature(const Rational& k);
  static CurvatureJet from_doubles(const Tensor4& r0, const Tensor5& r1, bool conformal_normal);
  static CurvatureJet load(std::istream& in);
  static CurvatureJet load_file(const std::string& path);
  void save(std::ostream& out) const;

  const Rational& r0(int a, int b, int c, int d) const { return r0_[idx4(a, b, c, d)]; }
  const Rational& r1(int a, int b, int c, int d, int e) const { return r1_[idx5(a, b, c, d, e)]; }
  const Rational& r2(int a, int b, int c, int d, int e, int f) const { return (*r2_)[idx5(a, b, c, d, e) * 4 + f]; }
  void set_r0(int a, int b, int c, int d, const Rational& v) { r0_[idx4(a, b, c, d)] = v; }
  void set_r1(int a, int b, int c, int d, int e, const Rational& v) { r1_[idx5(a, b, c, d, e)] = v; }
  void set_r2(int a, int b, int c, int d, int e, int f, const Rational& v);
  bool has_r2() const { return r2_.has_value(); }

  bool conformal_normal() const { return conformal_normal_; }
  void set_conformal_normal(bool on) { conformal_normal_ = on; }

  // Ric_{bd}(0), Ric_{bd,e}(0) and R_{,e}(0).
  Rational ricci0(int b, int d) const;
  Rational ricci1(int b, int d, int e) const;
  Rational scalar_gradient(int e) const;

  // Jet of the rescaled metric y -> g(eps y) (R0 by eps^2, R1 by eps^3, R2 by eps^4).
  CurvatureJet blow_up(const Rational& eps) const;
  // All orders multiplied by the same factor.
  CurvatureJet scaled(const Rational& s) const;

  // Largest violation of antisymmetry, pair symmetry and first Bianchi over
  // every order present, as a double.
  double symmetry_defect() const;
  // Throws std::invalid_argument when symmetry_defect() exceeds `tolerance`
  // times max(1, largest entry), or when the conformal-normal flag is set and
  // the flagged conditions fail at the same tolerance.
  void validate(double tolerance = 1e-12) const;

  double max_abs() const;

private:
  std::vector<Rational> r0_;
  std::vector<Rational> r1_;
  std::optional<std::vector<Rational>> r2_;
  bool conformal_normal_ = false;
};

// Random jet with integer-derived rational entries, realizable by a metric,
// with Ric(0) = 0 and vanishing symmetrized Ricci derivative; the flag is set.
CurvatureJet random_conformal_normal_jet(std::mt19937_64& rng, int amplitude = 3);

// Adds a Ricci-derivative perturbation with nonzero scalar gradient but zero
// symmetrized part. The result no longer satisfies the contracted second
// Bianchi identity, so it is not realizable by any metric.
CurvatureJet with_scalar_gradient(const CurvatureJet& jet, const std::array<Rational, 4>& gradient);

// Random realizable jet with Ric(0) = 0 and Ric_{ij,k}(0) = 0 identically.
CurvatureJet random_jet_without_ricci_derivative(std::mt19937_64& rng, int amplitude = 3);

// Algebraic Weyl projection with respect to the Euclidean metric.
std::vector<Rational> weyl_projection(const std::vector<Rational>& riemann);

struct MetricTaylor {
  PolyMatrix coeffs;  // valid through degree 3
  CurvatureJet jet;
  bool inverse = false;

  const ExactPoly& operator()(int a, int b) const { return coeffs[a][b]; }
};

using PolyArray3 = std::array<PolyMatrix, kDim>;  // [c][a][b]
using PolyVector = std::array<ExactPoly, kDim>;

MetricTaylor metric_taylor_from_jet(const CurvatureJet& jet);
MetricTaylor inverse_metric_taylor(const MetricTaylor& mt);

// Polynomial product of g and its inverse minus the identity; identically
// zero through degree 3 when the inverse is right.
PolyMatrix inverse_product_residual(const MetricTaylor& g, const MetricTaylor& g_inv);

// log det of the expansion through degree 3.
ExactPoly log_det(const MetricTaylor& mt);

// d_c g^{ab}: formal derivative of the inverse expansion (valid through degree 2).
PolyArray3 d_inverse_metric(const MetricTaylor& mt);
// The same quantity assembled directly from the jet entries with averaged
// symmetrization brackets.
PolyArray3 d_inverse_metric_closed_form(const CurvatureJet& jet);

// d_{cd} g^{ab} from the closed form with symmetrized brackets; [c][d] -> matrix in (a,b).
std::array<std::array<PolyMatrix, kDim>, kDim> dd_inverse_metric_closed_form(const CurvatureJet& jet);
std::array<std::array<PolyMatrix, kDim>, kDim> dd_inverse_metric(const MetricTaylor& mt);

// sum_a d_a g^{ab}, indexed by b. Both require the conformal-normal flag and
// throw std::invalid_argument otherwise.
PolyVector contracted_first_derivative(const MetricTaylor& mt);
PolyVector contracted_first_derivative_closed_form(const CurvatureJet& jet);

// sum_a d_{ad} g^{ab}, indexed [d][b], valid through degree 1.
PolyMatrix contracted_second_derivative(const MetricTaylor& mt);
PolyMatrix contracted_second_derivative_closed_form(const CurvatureJet& jet);

enum class IdentityStatus { pass, fail, not_checkable };
std::string to_string(IdentityStatus s);

struct IdentityCheck {
  std::string name;
  IdentityStatus status = IdentityStatus::not_checkable;
  double residual = 0.0;  // largest absolute component, 0 when not checkable
};

// Checks, in order: ricci_vanishes, symmetrized_ricci_derivative,
// scalar_gradient, scalar_laplacian_weyl, symmetrized_second_ricci,
// contracted_bianchi. Residuals are computed exactly and compared against
// `tolerance` times max(1, largest jet entry).
std::vector<IdentityCheck> cnc_identity_suite(const CurvatureJet& jet, double tolerance = 1e-12);

// d_j g^{ij} d_i u + g^{ij} d_ij u with the Taylor expansion of g^{-1}.
double detone_laplacian(const MetricTaylor& mt, const ScalarField& u, const Point& x);

// The expansion as an analytic metric field, optionally scaled: g = delta + s * (g_taylor - delta).
MetricField metric_field(const MetricTaylor& mt, double amplitude = 1.0);

}  // namespace qlab
