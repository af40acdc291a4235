#pragma once

// Polynomials in four variables with exact rational coefficients and an
// explicit validity degree: coefficients above valid_degree() are unknown
// (they belong to the remainder) and are never reported.

#include <boost/multiprecision/cpp_int.hpp>
#include <array>
#include <map>
#include <string>
#include <vector>

#include "qlab/jet.hpp"

namespace qlab {

using Rational = boost::multiprecision::cpp_rational;

double to_double(const Rational& r);

class ExactPoly {
public:
  explicit ExactPoly(int valid_degree = 3) : valid_(valid_degree) {}

  static ExactPoly constant(const Rational& c, int valid_degree);
  static ExactPoly monomial(const MultiIndex& alpha, const Rational& c, int valid_degree);

  int valid_degree() const { return valid_; }
  const std::map<MultiIndex, Rational>& terms() const { return terms_; }
  Rational coeff(const MultiIndex& alpha) const;
  void add_term(const MultiIndex& alpha, const Rational& c);

  bool is_zero() const { return terms_.empty(); }
  ExactPoly homogeneous_part(int degree) const;
  ExactPoly truncated(int valid_degree) const;

  ExactPoly& operator+=(const ExactPoly& o);
  ExactPoly& operator-=(const ExactPoly& o);
  ExactPoly& operator*=(const Rational& s);
  friend ExactPoly operator+(ExactPoly a, const ExactPoly& b) { return a += b; }
  friend ExactPoly operator-(ExactPoly a, const ExactPoly& b) { return a -= b; }
  friend ExactPoly operator*(ExactPoly a, const Rational& s) { return a *= s; }
  friend ExactPoly operator*(const Rational& s, ExactPoly a) { return a *= s; }
  friend ExactPoly operator*(const ExactPoly& a, const ExactPoly& b);
  friend bool operator==(const ExactPoly& a, const ExactPoly& b);

  ExactPoly derivative(int axis) const;

  double eval(const Point& x) const;
  Jet eval(const JetPoint& x) const;

  // Largest |coefficient| as a double (0 for the zero polynomial).
  double max_abs_coeff() const;

  // Stable plain-text form: terms by degree, then by exponent tuple
  // descending, e.g. "1/3*x1^2*x2 - 2*x4^3 + O(r^4)".
  std::string to_string() const;

private:
  void prune();
  std::map<MultiIndex, Rational> terms_;
  int valid_;
};

using PolyMatrix = std::array<std::array<ExactPoly, kDim>, kDim>;

PolyMatrix identity_poly_matrix(int valid_degree);
PolyMatrix operator*(const PolyMatrix& a, const PolyMatrix& b);

// A polynomial with double coefficients, for fast evaluation on Jets.
class FloatPoly {
public:
  FloatPoly() = default;
  explicit FloatPoly(const ExactPoly& p);
  Jet eval(const JetPoint& x) const;
  double eval(const Point& x) const;

private:
  std::vector<std::pair<MultiIndex, double>> terms_;
};

}  // namespace qlab
