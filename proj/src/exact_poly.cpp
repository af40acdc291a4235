#include "qlab/exact_poly.hpp"

#include <cmath>
#include <sstream>

namespace qlab {

namespace {
int degree_of(const MultiIndex& a) { return a[0] + a[1] + a[2] + a[3]; }

bool term_order(const MultiIndex& a, const MultiIndex& b) {
  int da = degree_of(a), db = degree_of(b);
  if (da != db) return da < db;
  return a > b;
}
}  // namespace

double to_double(const Rational& r) { return r.convert_to<double>(); }

ExactPoly ExactPoly::constant(const Rational& c, int valid_degree) {
  ExactPoly p(valid_degree);
  p.add_term({0, 0, 0, 0}, c);
  return p;
}

ExactPoly ExactPoly::monomial(const MultiIndex& alpha, const Rational& c, int valid_degree) {
  ExactPoly p(valid_degree);
  p.add_term(alpha, c);
  return p;
}

Rational ExactPoly::coeff(const MultiIndex& alpha) const {
  auto it = terms_.find(alpha);
  return it == terms_.end() ? Rational(0) : it->second;
}

void ExactPoly::add_term(const MultiIndex& alpha, const Rational& c) {
  if (degree_of(alpha) > valid_ || c == 0) return;
  auto& slot = terms_[alpha];
  slot += c;
  if (slot == 0) terms_.erase(alpha);
}

ExactPoly ExactPoly::homogeneous_part(int degree) const {
  ExactPoly p(valid_);
  for (const auto& [a, c] : terms_)
    if (degree_of(a) == degree) p.terms_.emplace(a, c);
  return p;
}

ExactPoly ExactPoly::truncated(int valid_degree) const {
  ExactPoly p(std::min(valid_, valid_degree));
  for (const auto& [a, c] : terms_)
    if (degree_of(a) <= p.valid_) p.terms_.emplace(a, c);
  return p;
}

void ExactPoly::prune() {
  for (auto it = terms_.begin(); it != terms_.end();) {
    if (it->second == 0 || degree_of(it->first) > valid_) it = terms_.erase(it);
    else ++it;
  }
}

ExactPoly& ExactPoly::operator+=(const ExactPoly& o) {
  valid_ = std::min(valid_, o.valid_);
  for (const auto& [a, c] : o.terms_) terms_[a] += c;
  prune();
  return *this;
}

ExactPoly& ExactPoly::operator-=(const ExactPoly& o) {
  valid_ = std::min(valid_, o.valid_);
  for (const auto& [a, c] : o.terms_) terms_[a] -= c;
  prune();
  return *this;
}

ExactPoly& ExactPoly::operator*=(const Rational& s) {
  for (auto& [a, c] : terms_) c *= s;
  prune();
  return *this;
}

ExactPoly operator*(const ExactPoly& a, const ExactPoly& b) {
  // The product of a degree-p-valid and a degree-q-valid series is only
  // known up to min(p + lowest(b), q + lowest(a)); we keep min(p, q), which
  // is what the callers need for series that start at degree 0.
  ExactPoly r(std::min(a.valid_, b.valid_));
  for (const auto& [ea, ca] : a.terms_)
    for (const auto& [eb, cb] : b.terms_) {
      MultiIndex e;
      for (int i = 0; i < kDim; ++i) e[i] = ea[i] + eb[i];
      if (degree_of(e) > r.valid_) continue;
      r.terms_[e] += ca * cb;
    }
  r.prune();
  return r;
}

bool operator==(const ExactPoly& a, const ExactPoly& b) { return a.valid_ == b.valid_ && a.terms_ == b.terms_; }

ExactPoly ExactPoly::derivative(int axis) const {
  ExactPoly r(valid_ - 1);
  for (const auto& [a, c] : terms_) {
    if (a[axis] == 0) continue;
    MultiIndex e = a;
    e[axis] -= 1;
    r.terms_[e] += c * a[axis];
  }
  r.prune();
  return r;
}

double ExactPoly::eval(const Point& x) const { return FloatPoly(*this).eval(x); }
Jet ExactPoly::eval(const JetPoint& x) const { return FloatPoly(*this).eval(x); }

double ExactPoly::max_abs_coeff() const {
  double m = 0.0;
  for (const auto& [a, c] : terms_) m = std::max(m, std::abs(to_double(c)));
  return m;
}

std::string ExactPoly::to_string() const {
  std::vector<std::pair<MultiIndex, Rational>> sorted(terms_.begin(), terms_.end());
  std::sort(sorted.begin(), sorted.end(), [](const auto& l, const auto& r) { return term_order(l.first, r.first); });
  std::ostringstream os;
  bool first = true;
  for (const auto& [a, c] : sorted) {
    Rational mag = c < 0 ? Rational(-c) : c;
    if (first) os << (c < 0 ? "-" : "");
    else os << (c < 0 ? " - " : " + ");
    first = false;
    bool unit = mag == 1 && degree_of(a) > 0;
    if (!unit) os << mag;
    bool need_star = !unit;
    for (int i = 0; i < kDim; ++i) {
      if (a[i] == 0) continue;
      os << (need_star ? "*" : "") << 'x' << (i + 1);
      if (a[i] > 1) os << '^' << a[i];
      need_star = true;
    }
  }
  if (first) os << '0';
  os << " + O(r^" << valid_ + 1 << ')';
  return os.str();
}

PolyMatrix identity_poly_matrix(int valid_degree) {
  PolyMatrix m;
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j) m[i][j] = i == j ? ExactPoly::constant(1, valid_degree) : ExactPoly(valid_degree);
  return m;
}

PolyMatrix operator*(const PolyMatrix& a, const PolyMatrix& b) {
  PolyMatrix r;
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j) {
      ExactPoly acc(std::min(a[i][0].valid_degree(), b[0][j].valid_degree()));
      for (int k = 0; k < kDim; ++k) acc += a[i][k] * b[k][j];
      r[i][j] = acc;
    }
  return r;
}

FloatPoly::FloatPoly(const ExactPoly& p) {
  for (const auto& [a, c] : p.terms()) terms_.emplace_back(a, to_double(c));
}

double FloatPoly::eval(const Point& x) const {
  double s = 0.0;
  for (const auto& [a, c] : terms_) {
    double t = c;
    for (int i = 0; i < kDim; ++i)
      for (int k = 0; k < a[i]; ++k) t *= x[i];
    s += t;
  }
  return s;
}

Jet FloatPoly::eval(const JetPoint& x) const {
  const int order = x[0].order();
  // Powers of each variable up to the largest exponent present.
  int max_e = 0;
  for (const auto& [a, c] : terms_)
    for (int e : a) max_e = std::max(max_e, e);
  std::vector<std::array<Jet, kDim>> pw(max_e + 1);
  for (int i = 0; i < kDim; ++i) {
    pw[0][i] = Jet::constant(1.0, order);
    for (int e = 1; e <= max_e; ++e) pw[e][i] = pw[e - 1][i] * x[i];
  }
  Jet s = Jet::constant(0.0, order);
  for (const auto& [a, c] : terms_) {
    Jet t = Jet::constant(c, order);
    for (int i = 0; i < kDim; ++i)
      if (a[i] > 0) t = t * pw[a[i]][i];
    s += t;
  }
  return s;
}

}  // namespace qlab
