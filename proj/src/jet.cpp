#include "qlab/jet.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace qlab {
namespace {

struct Layout {
  std::array<MultiIndex, Jet::kSize> index{};
  std::array<int, Jet::kSize> degree{};
  std::array<int, 625> slot_of{};  // (a0,a1,a2,a3) in base 5
  std::array<int, kMaxOrder + 2> begin{};  // first slot of each degree

  struct Term {
    int out, a, b;
  };
  std::vector<Term> products;                 // sorted by degree of out
  std::array<std::size_t, kMaxOrder + 1> products_end{};

  static int key(const MultiIndex& m) { return ((m[0] * 5 + m[1]) * 5 + m[2]) * 5 + m[3]; }

  Layout() {
    slot_of.fill(-1);
    int s = 0;
    for (int deg = 0; deg <= kMaxOrder; ++deg) {
      begin[deg] = s;
      for (int a0 = deg; a0 >= 0; --a0)
        for (int a1 = deg - a0; a1 >= 0; --a1)
          for (int a2 = deg - a0 - a1; a2 >= 0; --a2) {
            MultiIndex m{a0, a1, a2, deg - a0 - a1 - a2};
            index[s] = m;
            degree[s] = deg;
            slot_of[key(m)] = s;
            ++s;
          }
    }
    begin[kMaxOrder + 1] = s;

    for (int out_deg = 0; out_deg <= kMaxOrder; ++out_deg) {
      for (int i = 0; i < Jet::kSize; ++i)
        for (int j = 0; j < Jet::kSize; ++j) {
          if (degree[i] + degree[j] != out_deg) continue;
          MultiIndex m;
          for (int k = 0; k < kDim; ++k) m[k] = index[i][k] + index[j][k];
          products.push_back({slot_of[key(m)], i, j});
        }
      products_end[out_deg] = products.size();
    }
  }
};

const Layout& layout() {
  static const Layout l;
  return l;
}

double factorial(int n) {
  double f = 1.0;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

}  // namespace

namespace jet_layout {
int slot(const MultiIndex& alpha) {
  for (int a : alpha)
    if (a < 0 || a > kMaxOrder) return -1;
  return layout().slot_of[Layout::key(alpha)];
}
const MultiIndex& index(int s) { return layout().index[s]; }
int degree(int s) { return layout().degree[s]; }
int size_for_order(int order) { return layout().begin[order + 1]; }
}  // namespace jet_layout

Jet Jet::constant(double value, int order) {
  Jet j;
  j.order_ = order;
  j.c_[0] = value;
  return j;
}

Jet Jet::variable(int axis, double at, int order) {
  Jet j = constant(at, order);
  if (order >= 1) j.c_[1 + axis] = 1.0;
  return j;
}

double Jet::coeff(const MultiIndex& alpha) const {
  int s = jet_layout::slot(alpha);
  if (s < 0 || layout().degree[s] > order_) throw std::out_of_range("jet coefficient beyond tracked order");
  return c_[s];
}

double Jet::partial(const MultiIndex& alpha) const {
  double w = 1.0;
  for (int a : alpha) w *= factorial(a);
  return coeff(alpha) * w;
}

void Jet::set_coeff(const MultiIndex& alpha, double v) {
  int s = jet_layout::slot(alpha);
  if (s < 0 || layout().degree[s] > order_) throw std::out_of_range("jet coefficient beyond tracked order");
  c_[s] = v;
}

Jet Jet::d(int axis) const {
  if (order_ == 0) throw std::logic_error("cannot differentiate an order-0 jet");
  Jet r = constant(0.0, order_ - 1);
  const auto& L = layout();
  for (int s = 0; s < L.begin[order_]; ++s) {
    MultiIndex m = L.index[s];
    m[axis] += 1;
    r.c_[s] = c_[L.slot_of[Layout::key(m)]] * m[axis];
  }
  return r;
}

Jet Jet::truncated(int order) const {
  Jet r = *this;
  if (order >= order_) return r;
  r.order_ = order;
  for (int s = layout().begin[order + 1]; s < kSize; ++s) r.c_[s] = 0.0;
  return r;
}

Jet& Jet::operator+=(const Jet& o) {
  order_ = std::min(order_, o.order_);
  int n = jet_layout::size_for_order(order_);
  for (int s = 0; s < n; ++s) c_[s] += o.c_[s];
  for (int s = n; s < kSize; ++s) c_[s] = 0.0;
  return *this;
}

Jet& Jet::operator-=(const Jet& o) {
  order_ = std::min(order_, o.order_);
  int n = jet_layout::size_for_order(order_);
  for (int s = 0; s < n; ++s) c_[s] -= o.c_[s];
  for (int s = n; s < kSize; ++s) c_[s] = 0.0;
  return *this;
}

Jet& Jet::operator*=(double s) {
  for (auto& v : c_) v *= s;
  return *this;
}

Jet operator*(const Jet& a, const Jet& b) {
  Jet r = Jet::constant(0.0, std::min(a.order_, b.order_));
  const auto& L = layout();
  std::size_t end = L.products_end[r.order_];
  for (std::size_t t = 0; t < end; ++t) {
    const auto& p = L.products[t];
    r.c_[p.out] += a.c_[p.a] * b.c_[p.b];
  }
  return r;
}

Jet& Jet::operator*=(const Jet& o) { return *this = *this * o; }

Jet Jet::operator-() const {
  Jet r = *this;
  r *= -1.0;
  return r;
}

Jet Jet::compose(const std::array<double, kMaxOrder + 1>& taylor) const {
  Jet delta = *this;
  delta.c_[0] = 0.0;
  Jet r = constant(taylor[order_], order_);
  for (int n = order_ - 1; n >= 0; --n) {
    r = r * delta;
    r.c_[0] += taylor[n];
  }
  return r;
}

Jet operator/(double s, const Jet& b) { return pow(b, -1.0) * s; }
Jet operator/(const Jet& a, const Jet& b) { return a * pow(b, -1.0); }
Jet& Jet::operator/=(const Jet& o) { return *this = *this / o; }

Jet exp(const Jet& x) {
  double e = std::exp(x.value());
  return x.compose({e, e, e / 2.0, e / 6.0, e / 24.0});
}

Jet log(const Jet& x) {
  double a = x.value();
  if (!(a > 0.0)) throw std::domain_error("log of a non-positive jet");
  return x.compose({std::log(a), 1.0 / a, -1.0 / (2 * a * a), 1.0 / (3 * a * a * a), -1.0 / (4 * a * a * a * a)});
}

Jet pow(const Jet& x, double p) {
  double a = x.value();
  std::array<double, kMaxOrder + 1> t{};
  double binom = 1.0;
  for (int n = 0; n <= kMaxOrder; ++n) {
    t[n] = binom * std::pow(a, p - n);
    binom *= (p - n) / (n + 1);
  }
  return x.compose(t);
}

Jet sqrt(const Jet& x) { return pow(x, 0.5); }

Jet sin(const Jet& x) {
  double s = std::sin(x.value()), c = std::cos(x.value());
  return x.compose({s, c, -s / 2.0, -c / 6.0, s / 24.0});
}

Jet cos(const Jet& x) {
  double s = std::sin(x.value()), c = std::cos(x.value());
  return x.compose({c, -s, -c / 2.0, s / 6.0, c / 24.0});
}

Jet atan(const Jet& x) {
  // Taylor coefficients of 1/(1+t^2) around a, integrated termwise.
  double a = x.value();
  std::array<double, kMaxOrder> g{};
  std::array<double, 3> q{1.0 + a * a, 2.0 * a, 1.0};
  g[0] = 1.0 / q[0];
  for (int n = 1; n < kMaxOrder; ++n) {
    double acc = 0.0;
    for (int k = 1; k <= std::min(n, 2); ++k) acc += q[k] * g[n - k];
    g[n] = -acc / q[0];
  }
  return x.compose({std::atan(a), g[0], g[1] / 2.0, g[2] / 3.0, g[3] / 4.0});
}

JetPoint jet_point(const Point& x, int order) {
  JetPoint p;
  for (int i = 0; i < kDim; ++i) p[i] = Jet::variable(i, x[i], order);
  return p;
}

}  // namespace qlab
