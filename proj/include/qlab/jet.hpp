#pragma once

// Truncated multivariate Taylor polynomials in four variables.
//
// A Jet stores the coefficients c_alpha of sum_alpha c_alpha dx^alpha for all
// multi-indices with |alpha| <= order (order <= 4). Arithmetic propagates the
// truncation, so evaluating a formula on Jet inputs yields exact partial
// derivatives up to the tracked order (modulo floating-point roundoff).

#include <array>
#include <cstdint>
#include <functional>

namespace qlab {

inline constexpr int kDim = 4;
inline constexpr int kMaxOrder = 4;

using Point = std::array<double, kDim>;
using MultiIndex = std::array<int, kDim>;

class Jet {
public:
  static constexpr int kSize = 70;  // monomials of degree <= 4 in 4 variables

  Jet() : order_(kMaxOrder) { c_.fill(0.0); }
  Jet(double value) : Jet() { c_[0] = value; }  // NOLINT: implicit promotion is intended

  static Jet constant(double value, int order);
  static Jet variable(int axis, double at, int order);

  int order() const { return order_; }
  double value() const { return c_[0]; }

  // Raw Taylor coefficient and the partial derivative d^alpha (alpha! * coeff).
  double coeff(const MultiIndex& alpha) const;
  double partial(const MultiIndex& alpha) const;
  double coeff_at(int slot) const { return c_[slot]; }
  void set_coeff(const MultiIndex& alpha, double v);

  // Formal derivative; the result carries order - 1.
  Jet d(int axis) const;
  Jet truncated(int order) const;

  Jet& operator+=(const Jet& o);
  Jet& operator-=(const Jet& o);
  Jet& operator*=(const Jet& o);
  Jet& operator*=(double s);
  Jet& operator/=(const Jet& o);
  Jet operator-() const;

  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator*(const Jet& a, const Jet& b);
  friend Jet operator*(Jet a, double s) { return a *= s; }
  friend Jet operator*(double s, Jet a) { return a *= s; }
  friend Jet operator/(const Jet& a, const Jet& b);
  friend Jet operator/(Jet a, double s) { return a *= 1.0 / s; }
  friend Jet operator/(double s, const Jet& b);

  // Compose a univariate function with this jet given f(a), f'(a)/1!, ...,
  // f^(order)(a)/order! at a = value().
  Jet compose(const std::array<double, kMaxOrder + 1>& taylor) const;

private:
  std::array<double, kSize> c_;
  int order_;
};

Jet exp(const Jet& x);
Jet log(const Jet& x);
Jet sqrt(const Jet& x);
Jet pow(const Jet& x, double p);
Jet sin(const Jet& x);
Jet cos(const Jet& x);
Jet atan(const Jet& x);

using JetPoint = std::array<Jet, kDim>;

// Variables x_i + dx_i expanded around the given point.
JetPoint jet_point(const Point& x, int order);

// Bookkeeping for the graded monomial layout.
namespace jet_layout {
int slot(const MultiIndex& alpha);
const MultiIndex& index(int slot);
int degree(int slot);
int size_for_order(int order);
}  // namespace jet_layout

}  // namespace qlab
