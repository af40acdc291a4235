#include "qlab/fields.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

namespace qlab {

Box Box::unbounded() {
  constexpr double inf = std::numeric_limits<double>::infinity();
  return Box{{-inf, -inf, -inf, -inf}, {inf, inf, inf, inf}};
}

Box Box::cube(double half_width, const Point& center) {
  Box b;
  for (int i = 0; i < kDim; ++i) {
    b.lo[i] = center[i] - half_width;
    b.hi[i] = center[i] + half_width;
  }
  return b;
}

bool Box::contains(const Point& x, double margin) const {
  for (int i = 0; i < kDim; ++i)
    if (x[i] < lo[i] + margin || x[i] > hi[i] - margin) return false;
  return true;
}

double Box::min_width() const {
  double w = std::numeric_limits<double>::infinity();
  for (int i = 0; i < kDim; ++i) w = std::min(w, hi[i] - lo[i]);
  return w;
}

std::string to_string(DerivativeMode m) {
  return m == DerivativeMode::analytic ? "analytic" : "finite-difference";
}

std::vector<double> fd_weights(int derivative_order, int half_width) {
  // Fornberg's recursion for weights at 0 on the nodes -m..m.
  const int n = 2 * half_width + 1;
  const int M = derivative_order;
  std::vector<double> x(n);
  for (int i = 0; i < n; ++i) x[i] = i - half_width;
  std::vector<std::vector<double>> C(n, std::vector<double>(M + 1, 0.0));
  C[0][0] = 1.0;
  double c1 = 1.0, c4 = x[0];
  for (int i = 1; i < n; ++i) {
    int mn = std::min(i, M);
    double c2 = 1.0, c5 = c4;
    c4 = x[i];
    for (int j = 0; j < i; ++j) {
      double c3 = x[i] - x[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k) C[i][k] = c1 * (k * C[i - 1][k - 1] - c5 * C[i - 1][k]) / c2;
        C[i][0] = -c1 * c5 * C[i - 1][0] / c2;
      }
      for (int k = mn; k >= 1; --k) C[j][k] = (c4 * C[j][k] - k * C[j][k - 1]) / c3;
      C[j][0] = c4 * C[j][0] / c3;
    }
    c1 = c2;
  }
  std::vector<double> w(n);
  for (int j = 0; j < n; ++j) w[j] = C[j][M];
  return w;
}

int fd_half_width(int derivative_order) {
  if (derivative_order == 0) return 0;
  return (derivative_order + 1) / 2 + 1;
}

std::vector<Jet> finite_difference_jets(const std::function<void(const Point&, double*)>& f, int components,
                                        const Point& x, double step, int order) {
  std::array<std::vector<double>, kMaxOrder + 1> weights;
  for (int d = 0; d <= order; ++d) weights[d] = fd_weights(d, fd_half_width(d));

  std::map<std::array<int, kDim>, std::vector<double>> cache;
  auto sample = [&](const std::array<int, kDim>& off) -> const std::vector<double>& {
    auto it = cache.find(off);
    if (it != cache.end()) return it->second;
    Point p = x;
    for (int i = 0; i < kDim; ++i) p[i] += off[i] * step;
    std::vector<double> v(components);
    f(p, v.data());
    return cache.emplace(off, std::move(v)).first->second;
  };

  std::vector<Jet> out(components, Jet::constant(0.0, order));
  const int n = jet_layout::size_for_order(order);
  for (int s = 0; s < n; ++s) {
    const MultiIndex& alpha = jet_layout::index(s);
    std::array<int, kDim> hw{};
    for (int i = 0; i < kDim; ++i) hw[i] = fd_half_width(alpha[i]);
    std::vector<double> acc(components, 0.0);
    std::array<int, kDim> off{};
    for (off[0] = -hw[0]; off[0] <= hw[0]; ++off[0])
      for (off[1] = -hw[1]; off[1] <= hw[1]; ++off[1])
        for (off[2] = -hw[2]; off[2] <= hw[2]; ++off[2])
          for (off[3] = -hw[3]; off[3] <= hw[3]; ++off[3]) {
            double w = 1.0;
            for (int i = 0; i < kDim; ++i) w *= weights[alpha[i]][off[i] + hw[i]];
            if (w == 0.0) continue;
            const auto& v = sample(off);
            for (int c = 0; c < components; ++c) acc[c] += w * v[c];
          }
    double scale = 1.0;
    for (int i = 0; i < kDim; ++i) {
      scale /= std::pow(step, alpha[i]);
      for (int k = 2; k <= alpha[i]; ++k) scale /= k;
    }
    for (int c = 0; c < components; ++c) out[c].set_coeff(alpha, acc[c] * scale);
  }
  return out;
}

namespace {
double default_step(const Box& box, double step) {
  if (step > 0.0) return step;
  double w = box.min_width();
  if (!std::isfinite(w)) throw std::invalid_argument("sampled field on an unbounded box needs an explicit step");
  return w * 1e-2;
}

void require_inside(const Box& box, const Point& x, double margin) {
  if (!box.contains(x, margin)) throw std::out_of_range("point outside field domain");
}
}  // namespace

ScalarField ScalarField::analytic(JetFn f, Box box) {
  ScalarField s;
  s.mode_ = DerivativeMode::analytic;
  s.jet_fn_ = std::move(f);
  s.box_ = box;
  return s;
}

ScalarField ScalarField::sampled(ValueFn f, Box box, double step) {
  ScalarField s;
  s.mode_ = DerivativeMode::finite_difference;
  s.value_fn_ = std::move(f);
  s.box_ = box;
  s.step_ = default_step(box, step);
  return s;
}

ScalarField ScalarField::constant(double c) {
  return analytic([c](const JetPoint& x) { return Jet::constant(c, x[0].order()); });
}

double ScalarField::operator()(const Point& x) const {
  if (mode_ == DerivativeMode::analytic) return jet_fn_(jet_point(x, 0)).value();
  return value_fn_(x);
}

Jet ScalarField::jet(const Point& x, int order) const {
  if (mode_ == DerivativeMode::analytic) {
    require_inside(box_, x, 0.0);
    return jet_fn_(jet_point(x, order)).truncated(order);
  }
  require_inside(box_, x, 3 * step_);
  auto fn = [this](const Point& p, double* out) { out[0] = value_fn_(p); };
  return finite_difference_jets(fn, 1, x, step_, order)[0];
}

Eigen::Vector4d ScalarField::gradient(const Point& x) const {
  Jet j = jet(x, 1);
  Eigen::Vector4d g;
  for (int i = 0; i < kDim; ++i) g[i] = j.d(i).value();
  return g;
}

void require_positive_definite(const Eigen::Matrix4d& g) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(g, Eigen::EigenvaluesOnly);
  if (!(es.eigenvalues()[0] > kEigenvalueFloor)) throw std::domain_error("metric is not positive definite");
}

MetricField MetricField::analytic(JetFn f, Box box) {
  MetricField m;
  m.mode_ = DerivativeMode::analytic;
  m.jet_fn_ = std::move(f);
  m.box_ = box;
  return m;
}

MetricField MetricField::sampled(ValueFn f, Box box, double step) {
  MetricField m;
  m.mode_ = DerivativeMode::finite_difference;
  m.value_fn_ = std::move(f);
  m.box_ = box;
  m.step_ = default_step(box, step);
  return m;
}

MetricField MetricField::flat(Box box) {
  return analytic(
      [](const JetPoint& x) {
        MetricJet g;
        int o = x[0].order();
        for (int i = 0; i < kDim; ++i)
          for (int j = 0; j < kDim; ++j) g[i][j] = Jet::constant(i == j ? 1.0 : 0.0, o);
        return g;
      },
      box);
}

MetricField MetricField::conformally_flat(const ScalarField& w) {
  if (w.mode() != DerivativeMode::analytic) throw std::invalid_argument("conformally_flat expects an analytic factor");
  auto fn = w.jet_fn();
  return analytic(
      [fn](const JetPoint& x) {
        Jet e = exp(2.0 * fn(x));
        MetricJet g;
        Jet zero = Jet::constant(0.0, e.order());
        for (int i = 0; i < kDim; ++i)
          for (int j = 0; j < kDim; ++j) g[i][j] = i == j ? e : zero;
        return g;
      },
      w.box());
}

Eigen::Matrix4d MetricField::operator()(const Point& x) const {
  if (mode_ == DerivativeMode::finite_difference) return value_fn_(x);
  MetricJet g = jet_fn_(jet_point(x, 0));
  Eigen::Matrix4d m;
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j) m(i, j) = g[i][j].value();
  return m;
}

MetricJet MetricField::jet(const Point& x, int order) const {
  MetricJet g;
  if (mode_ == DerivativeMode::analytic) {
    require_inside(box_, x, 0.0);
    g = jet_fn_(jet_point(x, order));
    for (auto& row : g)
      for (auto& e : row) e = e.truncated(order);
  } else {
    require_inside(box_, x, 3 * step_);
    auto fn = [this](const Point& p, double* out) {
      Eigen::Matrix4d m = value_fn_(p);
      int k = 0;
      for (int i = 0; i < kDim; ++i)
        for (int j = i; j < kDim; ++j) out[k++] = m(i, j);
    };
    auto jets = finite_difference_jets(fn, 10, x, step_, order);
    int k = 0;
    for (int i = 0; i < kDim; ++i)
      for (int j = i; j < kDim; ++j) {
        g[i][j] = jets[k];
        g[j][i] = jets[k];
        ++k;
      }
  }
  Eigen::Matrix4d g0;
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j) g0(i, j) = g[i][j].value();
  require_positive_definite(g0);
  return g;
}

}  // namespace qlab
