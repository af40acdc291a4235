#include "qlab/curvature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qlab {

Eigen::Matrix4d RiemannAtPoint::ricci() const {
  Eigen::Matrix4d ric = Eigen::Matrix4d::Zero();
  for (int b = 0; b < 4; ++b)
    for (int d = 0; d < 4; ++d)
      for (int a = 0; a < 4; ++a)
        for (int c = 0; c < 4; ++c) ric(b, d) += g_inv(a, c) * R[idx4(a, b, c, d)];
  return ric;
}

double RiemannAtPoint::scalar() const { return (g_inv.cwiseProduct(ricci())).sum(); }

double RiemannAtPoint::ricci_norm_sq() const {
  Eigen::Matrix4d ric = ricci();
  Eigen::Matrix4d up = g_inv * ric * g_inv;
  return up.cwiseProduct(ric).sum();
}

double RiemannAtPoint::symmetry_defect() const {
  double worst = 0.0;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int c = 0; c < 4; ++c)
        for (int d = 0; d < 4; ++d) {
          double r = R[idx4(a, b, c, d)];
          worst = std::max(worst, std::abs(r + R[idx4(b, a, c, d)]));
          worst = std::max(worst, std::abs(r + R[idx4(a, b, d, c)]));
          worst = std::max(worst, std::abs(r - R[idx4(c, d, a, b)]));
          worst = std::max(worst, std::abs(r + R[idx4(a, c, d, b)] + R[idx4(a, d, b, c)]));
        }
  return worst;
}

MetricJet inverse_metric_jet(const MetricJet& g) {
  // g = g0 (I + E) with E vanishing at the point; the Neumann series
  // terminates at the jet order.
  const int order = g[0][0].order();
  Eigen::Matrix4d g0;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) g0(i, j) = g[i][j].value();
  Eigen::Matrix4d h = g0.inverse();

  MetricJet e;  // E = h (g - g0)
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      Jet acc = Jet::constant(0.0, order);
      for (int k = 0; k < 4; ++k) {
        Jet dg = g[k][j];
        dg -= Jet::constant(g0(k, j), order);
        acc += h(i, k) * dg;
      }
      e[i][j] = acc;
    }

  MetricJet term, sum;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      term[i][j] = Jet::constant(i == j ? 1.0 : 0.0, order);
      sum[i][j] = term[i][j];
    }
  for (int n = 1; n <= order; ++n) {
    MetricJet next;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) {
        Jet acc = Jet::constant(0.0, order);
        for (int k = 0; k < 4; ++k) acc -= term[i][k] * e[k][j];
        next[i][j] = acc;
      }
    term = next;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) sum[i][j] += term[i][j];
  }
  MetricJet inv;  // (I+E)^{-1} h
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      Jet acc = Jet::constant(0.0, order);
      for (int k = 0; k < 4; ++k) acc += sum[i][k] * h(k, j);
      inv[i][j] = acc;
    }
  return inv;
}

namespace {

Eigen::Matrix4d values(const MetricJet& m) {
  Eigen::Matrix4d r;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) r(i, j) = m[i][j].value();
  return r;
}

}  // namespace

GeometryJet geometry_jet(const MetricField& metric, const Point& x, int order) {
  GeometryJet geo;
  geo.order = order;
  geo.g = metric.jet(x, order);
  geo.g_inv = inverse_metric_jet(geo.g);
  if (order == 0) return geo;
  std::array<MetricJet, 4> dg;
  for (int k = 0; k < 4; ++k)
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) dg[k][i][j] = geo.g[i][j].d(k);
  for (int k = 0; k < 4; ++k)
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) geo.gamma_low[k][i][j] = 0.5 * (dg[i][j][k] + dg[j][i][k] - dg[k][i][j]);
  for (int l = 0; l < 4; ++l)
    for (int i = 0; i < 4; ++i)
      for (int j = i; j < 4; ++j) {
        Jet acc = Jet::constant(0.0, order - 1);
        for (int k = 0; k < 4; ++k) acc += geo.g_inv[l][k] * geo.gamma_low[k][i][j];
        geo.gamma[l][i][j] = acc;
        geo.gamma[l][j][i] = acc;
      }
  return geo;
}

std::array<Jet, 256> riemann_jets(const GeometryJet& geo) {
  if (geo.order < 2) throw std::invalid_argument("Riemann tensor needs second derivatives of the metric");
  const int out = geo.order - 2;
  std::array<Jet, 256> R;
  auto d2 = [&](int i, int j, int a, int b) { return geo.g[i][j].d(a).d(b); };
  for (int a = 0; a < 4; ++a)
    for (int b = a + 1; b < 4; ++b)
      for (int c = 0; c < 4; ++c)
        for (int d = c + 1; d < 4; ++d) {
          if (c * 4 + d < a * 4 + b) continue;
          Jet r = 0.5 * (d2(a, d, b, c) + d2(b, c, a, d) - d2(a, c, b, d) - d2(b, d, a, c));
          r = r.truncated(out);
          for (int n = 0; n < 4; ++n)
            r += geo.gamma[n][b][c] * geo.gamma_low[n][a][d] - geo.gamma[n][b][d] * geo.gamma_low[n][a][c];
          for (auto [p, q, s] : {std::tuple{a, b, 1.0}, std::tuple{b, a, -1.0}})
            for (auto [u, v, t] : {std::tuple{c, d, 1.0}, std::tuple{d, c, -1.0}}) {
              R[idx4(p, q, u, v)] = r * (s * t);
              R[idx4(u, v, p, q)] = r * (s * t);
            }
        }
  Jet zero = Jet::constant(0.0, out);
  for (int a = 0; a < 4; ++a)
    for (int c = 0; c < 4; ++c)
      for (int d = 0; d < 4; ++d) {
        R[idx4(a, a, c, d)] = zero;
        R[idx4(c, d, a, a)] = zero;
      }
  return R;
}

MetricJet ricci_jets(const GeometryJet& geo, const std::array<Jet, 256>& riem) {
  MetricJet ric;
  const int out = riem[idx4(0, 1, 0, 1)].order();
  for (int b = 0; b < 4; ++b)
    for (int d = b; d < 4; ++d) {
      Jet acc = Jet::constant(0.0, out);
      for (int a = 0; a < 4; ++a)
        for (int c = 0; c < 4; ++c) acc += geo.g_inv[a][c] * riem[idx4(a, b, c, d)];
      ric[b][d] = acc;
      ric[d][b] = acc;
    }
  return ric;
}

Jet scalar_jet(const GeometryJet& geo, const MetricJet& ric) {
  Jet acc = Jet::constant(0.0, ric[0][0].order());
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) acc += geo.g_inv[i][j] * ric[i][j];
  return acc;
}

Jet laplacian(const GeometryJet& geo, const Jet& f) {
  std::array<Jet, 4> df;
  for (int k = 0; k < 4; ++k) df[k] = f.d(k);
  Jet acc = Jet::constant(0.0, f.order() - 2);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      Jet inner = df[i].d(j);
      for (int k = 0; k < 4; ++k) inner -= geo.gamma[k][i][j] * df[k];
      acc += geo.g_inv[i][j] * inner;
    }
  return acc;
}

RiemannAtPoint riemann_of_metric(const MetricField& g, const Point& x) {
  GeometryJet geo = geometry_jet(g, x, 2);
  auto R = riemann_jets(geo);
  RiemannAtPoint out;
  for (int k = 0; k < 256; ++k) out.R[k] = R[k].value();
  out.g = values(geo.g);
  out.g_inv = values(geo.g_inv);
  return out;
}

RiemannJetAtPoint riemann_with_derivative(const MetricField& g, const Point& x) {
  GeometryJet geo = geometry_jet(g, x, 3);
  auto R = riemann_jets(geo);
  RiemannJetAtPoint out;
  for (int k = 0; k < 256; ++k) out.riemann.R[k] = R[k].value();
  out.riemann.g = values(geo.g);
  out.riemann.g_inv = values(geo.g_inv);
  double G[4][4][4];
  for (int k = 0; k < 4; ++k)
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) G[k][i][j] = geo.gamma[k][i][j].value();
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int c = 0; c < 4; ++c)
        for (int d = 0; d < 4; ++d)
          for (int e = 0; e < 4; ++e) {
            double v = R[idx4(a, b, c, d)].d(e).value();
            for (int f = 0; f < 4; ++f) {
              v -= G[f][e][a] * out.riemann.R[idx4(f, b, c, d)];
              v -= G[f][e][b] * out.riemann.R[idx4(a, f, c, d)];
              v -= G[f][e][c] * out.riemann.R[idx4(a, b, f, d)];
              v -= G[f][e][d] * out.riemann.R[idx4(a, b, c, f)];
            }
            out.nabla[idx5(a, b, c, d, e)] = v;
          }
  return out;
}

Tensor4 weyl_tensor(const RiemannAtPoint& riem, const Eigen::Matrix4d& g, double tolerance) {
  double scale = 1.0;
  for (double v : riem.R) scale = std::max(scale, std::abs(v));
  if (riem.symmetry_defect() > tolerance * scale) throw std::invalid_argument("Riemann input violates its symmetries");
  Eigen::Matrix4d g_inv = g.inverse();
  RiemannAtPoint r = riem;
  r.g = g;
  r.g_inv = g_inv;
  Eigen::Matrix4d ric = r.ricci();
  double s = r.scalar();
  Tensor4 W;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int c = 0; c < 4; ++c)
        for (int d = 0; d < 4; ++d) {
          double kn = ric(a, c) * g(b, d) + ric(b, d) * g(a, c) - ric(a, d) * g(b, c) - ric(b, c) * g(a, d);
          double gg = g(a, c) * g(b, d) - g(a, d) * g(b, c);
          W[idx4(a, b, c, d)] = riem.R[idx4(a, b, c, d)] - 0.5 * kn + s / 6.0 * gg;
        }
  return W;
}

double full_norm_sq(const Tensor4& t, const Eigen::Matrix4d& gi) {
  // Raise one index at a time to keep the cost at 4 * 4^5.
  Tensor4 a = t, b{};
  for (int slot = 0; slot < 4; ++slot) {
    b.fill(0.0);
    for (int i0 = 0; i0 < 4; ++i0)
      for (int i1 = 0; i1 < 4; ++i1)
        for (int i2 = 0; i2 < 4; ++i2)
          for (int i3 = 0; i3 < 4; ++i3) {
            std::array<int, 4> I{i0, i1, i2, i3};
            double acc = 0.0;
            for (int m = 0; m < 4; ++m) {
              std::array<int, 4> J = I;
              J[slot] = m;
              acc += gi(I[slot], m) * a[idx4(J[0], J[1], J[2], J[3])];
            }
            b[idx4(i0, i1, i2, i3)] = acc;
          }
    a = b;
  }
  double s = 0.0;
  for (int k = 0; k < 256; ++k) s += a[k] * t[k];
  return s;
}

double max_trace(const Tensor4& t, const Eigen::Matrix4d& gi) {
  double worst = 0.0;
  const std::array<std::pair<int, int>, 6> pairs{{{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}};
  for (auto [p, q] : pairs) {
    for (int x = 0; x < 4; ++x)
      for (int y = 0; y < 4; ++y) {
        double acc = 0.0;
        for (int m = 0; m < 4; ++m)
          for (int n = 0; n < 4; ++n) {
            std::array<int, 4> I{};
            int free_slot = 0;
            for (int s = 0; s < 4; ++s) {
              if (s == p) I[s] = m;
              else if (s == q) I[s] = n;
              else I[s] = free_slot++ == 0 ? x : y;
            }
            acc += gi(m, n) * t[idx4(I[0], I[1], I[2], I[3])];
          }
        worst = std::max(worst, std::abs(acc));
      }
  }
  return worst;
}

double q_curvature(const MetricField& g, const Point& x) {
  GeometryJet geo = geometry_jet(g, x, 4);
  auto riem = riemann_jets(geo);
  MetricJet ric = ricci_jets(geo, riem);
  Jet R = scalar_jet(geo, ric);
  double lap_R = laplacian(geo, R).value();
  Eigen::Matrix4d gi = values(geo.g_inv), rc = values(ric);
  double ric_sq = (gi * rc * gi).cwiseProduct(rc).sum();
  double s = R.value();
  return -(lap_R - s * s + 3.0 * ric_sq) / 12.0;
}

double paneitz_apply(const MetricField& g, const ScalarField& u, const Point& x) {
  GeometryJet geo = geometry_jet(g, x, 3);
  Jet uj = u.jet(x, 4);
  Jet lap_u = laplacian(geo, uj);
  double bilap = laplacian(geo, lap_u).value();

  auto riem = riemann_jets(geo);
  MetricJet ric = ricci_jets(geo, riem);
  Jet R = scalar_jet(geo, ric);
  std::array<Jet, 4> du;
  for (int j = 0; j < 4; ++j) du[j] = uj.d(j);
  // X^i = (2/3 R g^{ij} - 2 Ric^{ij}) d_j u; P u = Delta^2 u - div X with
  // Delta = div grad, the sign that makes P conformally covariant.
  std::array<Jet, 4> X;
  for (int i = 0; i < 4; ++i) {
    Jet acc = Jet::constant(0.0, 1);
    for (int j = 0; j < 4; ++j) {
      Jet ric_up = Jet::constant(0.0, 1);
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) ric_up += geo.g_inv[i][a] * geo.g_inv[j][b] * ric[a][b];
      acc += ((2.0 / 3.0) * R * geo.g_inv[i][j] - 2.0 * ric_up) * du[j];
    }
    X[i] = acc;
  }
  double div = 0.0;
  for (int i = 0; i < 4; ++i) {
    div += X[i].d(i).value();
    for (int k = 0; k < 4; ++k) div += geo.gamma[i][i][k].value() * X[k].value();
  }
  return bilap - div;
}

MetricField conformal_transform(const MetricField& g, const ScalarField& u) {
  if (g.mode() == DerivativeMode::analytic && u.mode() == DerivativeMode::analytic) {
    auto gf = g.jet_fn();
    auto uf = u.jet_fn();
    return MetricField::analytic(
        [gf, uf](const JetPoint& x) {
          MetricJet m = gf(x);
          Jet e = exp(2.0 * uf(x));
          for (auto& row : m)
            for (auto& v : row) v = v * e;
          return m;
        },
        g.box());
  }
  double step = g.mode() == DerivativeMode::finite_difference ? g.step() : u.step();
  return MetricField::sampled([g, u](const Point& x) -> Eigen::Matrix4d { return std::exp(2.0 * u(x)) * g(x); },
                              g.box(), step);
}

namespace {
DeviationReport base_report(const MetricField& g, std::size_t n) {
  DeviationReport r;
  r.samples = n;
  r.derivative_mode = to_string(g.mode());
  r.step = g.mode() == DerivativeMode::analytic ? 0.0 : g.step();
  return r;
}
}  // namespace

DeviationReport check_conformal_covariance(const MetricField& g, const ScalarField& u, const ScalarField& f,
                                           const std::vector<Point>& samples) {
  MetricField gt = conformal_transform(g, u);
  DeviationReport r = base_report(gt, samples.size());
  for (const auto& x : samples) {
    double lhs = paneitz_apply(gt, f, x);
    double rhs = std::exp(-4.0 * u(x)) * paneitz_apply(g, f, x);
    r.max_deviation = std::max(r.max_deviation, std::abs(lhs - rhs));
  }
  return r;
}

DeviationReport check_q_transformation(const MetricField& g, const ScalarField& u, const std::vector<Point>& samples) {
  MetricField gt = conformal_transform(g, u);
  DeviationReport r = base_report(gt, samples.size());
  for (const auto& x : samples) {
    double lhs = paneitz_apply(g, u, x) + 2.0 * q_curvature(g, x);
    double rhs = 2.0 * q_curvature(gt, x) * std::exp(4.0 * u(x));
    r.max_deviation = std::max(r.max_deviation, std::abs(lhs - rhs));
  }
  return r;
}

ChartQuadratureModel sphere_chart_model(int n_polar, int n_t, int n_phi, const ScalarField* perturbation) {
  auto round = [](const JetPoint& x) {
    Jet r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2] + x[3] * x[3];
    return log(2.0 / (1.0 + r2));
  };
  ScalarField::JetFn north = round, south = round;
  if (perturbation) {
    auto pf = perturbation->jet_fn();
    north = [pf, round](const JetPoint& x) { return round(x) + pf(x); };
    south = [pf, round](const JetPoint& y) {
      Jet r2 = y[0] * y[0] + y[1] * y[1] + y[2] * y[2] + y[3] * y[3];
      JetPoint x;
      for (int i = 0; i < 4; ++i) x[i] = y[i] / r2;
      return round(y) + pf(x);
    };
  }
  ChartQuadratureModel m;
  m.name = perturbation ? "perturbed-round-S4" : "round-S4";
  Rule1D radial = gauss_legendre(n_polar, 0.0, 1.0);
  SphereRule s3 = SphereRule::product(n_t, n_phi);
  for (const auto& fn : {north, south}) {
    ChartPatch patch;
    patch.metric = MetricField::conformally_flat(ScalarField::analytic(fn, Box::cube(1.0)));
    for (int i = 0; i < n_polar; ++i) {
      double r = radial.nodes[i];
      for (std::size_t k = 0; k < s3.size(); ++k) {
        Point p;
        for (int d = 0; d < 4; ++d) p[d] = r * s3.nodes[k][d];
        patch.nodes.push_back(p);
        patch.weights.push_back(r * r * r * radial.weights[i] * s3.weights[k]);
      }
    }
    m.patches.push_back(std::move(patch));
  }
  if (perturbation) {
    // The perturbed volume has no closed form; measure it with the same rule.
    double vol = 0.0;
    for (const auto& patch : m.patches)
      for (std::size_t k = 0; k < patch.nodes.size(); ++k)
        vol += patch.weights[k] * std::sqrt(patch.metric(patch.nodes[k]).determinant());
    m.expected_volume = vol;
  } else {
    m.expected_volume = 8.0 * std::numbers::pi * std::numbers::pi / 3.0;
  }
  return m;
}

ChartQuadratureModel flat_torus_model(double side, int n) {
  ChartQuadratureModel m;
  m.name = "flat-torus";
  ChartPatch patch;
  patch.metric = MetricField::flat();
  double h = side / n, w = std::pow(h, 4);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d) {
          patch.nodes.push_back({(a + 0.5) * h, (b + 0.5) * h, (c + 0.5) * h, (d + 0.5) * h});
          patch.weights.push_back(w);
        }
  m.patches.push_back(std::move(patch));
  m.expected_volume = std::pow(side, 4);
  return m;
}

GaussBonnetReport gauss_bonnet_check(const ChartQuadratureModel& model) {
  GaussBonnetReport rep;
  for (const auto& patch : model.patches) {
    for (std::size_t k = 0; k < patch.nodes.size(); ++k) {
      const Point& x = patch.nodes[k];
      GeometryJet geo = geometry_jet(patch.metric, x, 4);
      auto riem = riemann_jets(geo);
      MetricJet ric = ricci_jets(geo, riem);
      Jet R = scalar_jet(geo, ric);
      Eigen::Matrix4d g = values(geo.g), gi = values(geo.g_inv), rc = values(ric);
      double ric_sq = (gi * rc * gi).cwiseProduct(rc).sum();
      double q = -(laplacian(geo, R).value() - R.value() * R.value() + 3.0 * ric_sq) / 12.0;
      RiemannAtPoint at;
      for (int i = 0; i < 256; ++i) at.R[i] = riem[i].value();
      at.g = g;
      at.g_inv = gi;
      double w2 = full_norm_sq(weyl_tensor(at, g, 1e-8), gi);
      double dv = std::sqrt(g.determinant()) * patch.weights[k];
      rep.volume += dv;
      rep.q_integral += q * dv;
      rep.weyl_integral += w2 / 8.0 * dv;
    }
  }
  rep.total = rep.q_integral + rep.weyl_integral;
  if (std::abs(rep.volume - model.expected_volume) > 0.01 * model.expected_volume)
    throw std::runtime_error("quadrature volume diverges from the model volume");
  return rep;
}

}  // namespace qlab
