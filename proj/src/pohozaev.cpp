#include "qlab/pohozaev.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "qlab/curvature.hpp"
#include "qlab/parallel.hpp"

namespace qlab {

namespace {

constexpr double kPi2 = std::numbers::pi * std::numbers::pi;

using Grid4 = std::array<std::array<double, kDim>, kDim>;

// Ricci derivative S_{ij,l} scaled by the amplitude.
using RicciDerivative = std::array<double, kDim * kDim * kDim>;

RicciDerivative ricci_derivative(const CurvedMetric& m) {
  RicciDerivative s{};
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j)
      for (int l = 0; l < kDim; ++l) s[(i * kDim + j) * kDim + l] = m.amplitude * to_double(m.taylor.jet.ricci1(i, j, l));
  return s;
}

// Local data at one node: u through third order, Lu = Delta_g u with its
// gradient, and g^{ij} with two derivatives.
struct NodeData {
  double u = 0.0;
  std::array<double, kDim> du{};
  Grid4 d2u{};
  double lap = 0.0;
  std::array<double, kDim> dlap{};
  Grid4 g_inv{};
  std::array<Grid4, kDim> dg_inv{};                    // [k][i][j] = d_k g^{ij}
  std::array<std::array<Grid4, kDim>, kDim> ddg_inv{};  // [k][m][i][j] = d_km g^{ij}
};

MultiIndex unit(int i) {
  MultiIndex a{};
  a[i] = 1;
  return a;
}

MultiIndex unit2(int i, int j) {
  MultiIndex a{};
  ++a[i];
  ++a[j];
  return a;
}

class NodeEvaluator {
public:
  NodeEvaluator(const ScalarField& u, std::optional<MetricField> metric) : u_(u), metric_(std::move(metric)) {}

  NodeData operator()(const Point& x) const {
    NodeData n;
    const Jet uj = u_.jet(x, 3);
    n.u = uj.value();
    std::array<Jet, kDim> du;
    for (int i = 0; i < kDim; ++i) {
      du[i] = uj.d(i);
      n.du[i] = du[i].value();
      for (int j = 0; j < kDim; ++j) n.d2u[i][j] = uj.partial(unit2(i, j));
    }
    Jet lap = Jet::constant(0.0, 1);
    if (!metric_) {
      for (int i = 0; i < kDim; ++i) {
        n.g_inv[i][i] = 1.0;
        lap += du[i].d(i);
      }
    } else {
      const MetricJet g_inv = inverse_metric_jet(metric_->jet(x, 2));
      for (int i = 0; i < kDim; ++i)
        for (int j = 0; j < kDim; ++j) {
          const Jet& gij = g_inv[i][j];
          n.g_inv[i][j] = gij.value();
          for (int k = 0; k < kDim; ++k) {
            n.dg_inv[k][i][j] = gij.partial(unit(k));
            for (int m = 0; m < kDim; ++m) n.ddg_inv[k][m][i][j] = gij.partial(unit2(k, m));
          }
          lap += (gij * du[j]).d(i);
        }
    }
    n.lap = lap.value();
    for (int i = 0; i < kDim; ++i) n.dlap[i] = lap.partial(unit(i));
    return n;
  }

private:
  const ScalarField& u_;
  std::optional<MetricField> metric_;
};

double dot(const std::array<double, kDim>& a, const Point& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3];
}

enum Slot { kI0, kSource, kThird, kGradient, kHessian, kSquare, kI2Metric, kI2Source, kI3, kI4, kSupDu2, kSupD2u, kSlots };
using Sums = std::array<double, kSlots>;

Sums accumulate(const ScalarField& u, const ScalarField& h, const ScalarField& b, const BallDomain& ball,
                const std::optional<MetricField>& metric, const RicciDerivative* ric) {
  NodeEvaluator eval(u, metric);
  const Rule1D& rad = ball.radial;
  const SphereRule& sph = ball.sphere;
  const std::size_t n_int = rad.nodes.size() * sph.size();
  const std::size_t n_all = n_int + sph.size();
  std::vector<Sums> per(n_all);

  parallel_for(n_all, [&](std::size_t idx) {
    Sums s{};
    const bool boundary = idx >= n_int;
    const std::size_t k = boundary ? idx - n_int : idx % sph.size();
    const double r = boundary ? ball.radius : rad.nodes[idx / sph.size()];
    const Point& nu = sph.nodes[k];
    Point xi, x;
    for (int d = 0; d < kDim; ++d) {
      xi[d] = r * nu[d];
      x[d] = ball.center[d] + xi[d];
    }
    const NodeData n = eval(x);
    const double xi_du = dot(n.du, xi);
    double du2 = 0.0, d2u_max = 0.0;
    for (int i = 0; i < kDim; ++i) {
      du2 += n.du[i] * n.du[i];
      for (int j = 0; j < kDim; ++j) d2u_max = std::max(d2u_max, std::abs(n.d2u[i][j]));
    }
    s[kSupDu2] = du2;
    s[kSupD2u] = d2u_max;

    if (boundary) {
      const double w = std::pow(ball.radius, 3) * sph.weights[k];
      const double xi_nu = ball.radius;
      const double hv = h(x);
      double third = 0.0, grad = 0.0, hess = 0.0;
      for (int i = 0; i < kDim; ++i)
        for (int j = 0; j < kDim; ++j) {
          const double gn = n.g_inv[i][j] * nu[j];
          if (gn == 0.0) continue;
          third += gn * n.dlap[i];
          grad += gn * n.du[i];
          double xi_hess = 0.0;
          for (int m = 0; m < kDim; ++m) xi_hess += xi[m] * n.d2u[i][m];
          hess += gn * xi_hess;
        }
      s[kSource] = w * 0.5 * hv * std::exp(4.0 * n.u) * xi_nu;
      s[kThird] = -w * third * xi_du;
      s[kGradient] = w * n.lap * grad;
      s[kHessian] = w * n.lap * hess;
      s[kSquare] = -w * 0.5 * n.lap * n.lap * xi_nu;
      if (ric) {
        double t = 0.0;
        for (int i = 0; i < kDim; ++i)
          for (int j = 0; j < kDim; ++j)
            for (int l = 0; l < kDim; ++l) t += (*ric)[(i * kDim + j) * kDim + l] * n.du[j] * xi_du * xi[l] * nu[i];
        s[kI3] = -2.0 * w * t;
      }
    } else {
      const double w = r * r * r * rad.weights[idx / sph.size()] * sph.weights[k];
      const Jet hj = h.jet(x, 1);
      double xi_dh = 0.0;
      for (int i = 0; i < kDim; ++i) xi_dh += xi[i] * hj.partial(unit(i));
      const double e4u = std::exp(4.0 * n.u);
      s[kI0] = w * (2.0 * hj.value() + 0.5 * xi_dh) * e4u;
      s[kI2Source] = -w * 2.0 * b(x) * xi_du;
      if (metric) {
        double t = 0.0;
        for (int i = 0; i < kDim; ++i)
          for (int j = 0; j < kDim; ++j) {
            double a = n.dg_inv[i][i][j] * n.du[j];
            for (int m = 0; m < kDim; ++m) a += xi[m] * (n.ddg_inv[i][m][i][j] * n.du[j] + n.dg_inv[m][i][j] * n.d2u[i][j]);
            t += a;
          }
        s[kI2Metric] = w * n.lap * t;
      }
      if (ric) {
        double t = 0.0;
        for (int i = 0; i < kDim; ++i) {
          double xi_hess = 0.0;
          for (int m = 0; m < kDim; ++m) xi_hess += xi[m] * n.d2u[i][m];
          for (int j = 0; j < kDim; ++j)
            for (int l = 0; l < kDim; ++l)
              t += (*ric)[(i * kDim + j) * kDim + l] * xi[l] * n.du[j] * (n.du[i] + xi_hess);
        }
        s[kI4] = 2.0 * w * t;
      }
    }
    per[idx] = s;
  });

  Sums total{};
  for (const Sums& s : per)
    for (int q = 0; q < kSlots; ++q) {
      if (q == kSupDu2 || q == kSupD2u)
        total[q] = std::max(total[q], s[q]);
      else
        total[q] += s[q];
    }
  return total;
}

PohozaevReport to_report(const Sums& s) {
  PohozaevReport r;
  r.i0 = s[kI0];
  r.i1_parts = {s[kSource], s[kThird], s[kGradient], s[kHessian], s[kSquare]};
  r.i1 = s[kSource] + s[kThird] + s[kGradient] + s[kHessian] + s[kSquare];
  r.i2_metric = s[kI2Metric];
  r.i2_source = s[kI2Source];
  r.i2 = r.i2_metric + r.i2_source;
  r.i3 = s[kI3];
  r.i4 = s[kI4];
  r.residual = r.i0 - (r.i1 + r.i2 + r.i3 + r.i4);
  return r;
}

double magnitude(const Sums& s) {
  double m = 0.0;
  for (int q = 0; q < kSupDu2; ++q) m += std::abs(s[q]);
  return m;
}

ScalarField doubled_step(const ScalarField& u) {
  return ScalarField::sampled([u](const Point& x) { return u(x); }, u.box(), 2.0 * u.step());
}

}  // namespace

BallDomain BallDomain::make(double radius, const Point& center, int n_r, int n_t, int n_phi, int panels) {
  if (!(radius > 0.0)) throw std::invalid_argument("ball radius must be positive");
  if (n_r < 1 || n_t < 1 || n_phi < 1 || panels < 0) throw std::invalid_argument("ball rule sizes must be positive");
  BallDomain b;
  b.center = center;
  b.radius = radius;
  b.n_r = n_r;
  b.n_t = n_t;
  b.n_phi = n_phi;
  b.panels = panels;
  std::vector<double> breaks{0.0};
  for (int k = panels; k >= 1; --k) breaks.push_back(std::ldexp(radius, -k));
  breaks.push_back(radius);
  b.radial = composite_gauss_legendre(n_r, breaks);
  b.sphere = SphereRule::product(n_t, n_phi);
  return b;
}

double BallDomain::interior_weight_sum() const {
  double s = 0.0, sw = 0.0;
  for (std::size_t i = 0; i < radial.nodes.size(); ++i) s += std::pow(radial.nodes[i], 3) * radial.weights[i];
  for (double w : sphere.weights) sw += w;
  return s * sw;
}

double BallDomain::boundary_weight_sum() const {
  double sw = 0.0;
  for (double w : sphere.weights) sw += w;
  return std::pow(radius, 3) * sw;
}

BallDomain BallDomain::coarsened() const {
  auto shrink = [](int n, int floor) { return std::max(floor, (2 * n + 2) / 3); };
  return make(radius, center, shrink(n_r, 2), shrink(n_t, 2), shrink(n_phi, 4), panels);
}

PohozaevReport pohozaev_balance(const ScalarField& u, const ScalarField& h, const ScalarField& b,
                                const BallDomain& ball, const std::optional<CurvedMetric>& metric) {
  std::optional<MetricField> field;
  RicciDerivative ric{};
  if (metric) {
    if (ball.radius > metric->taylor_radius) throw std::out_of_range("ball radius exceeds the Taylor radius");
    for (double c : ball.center)
      if (c != 0.0) throw std::invalid_argument("curved balance needs the ball centred at the chart origin");
    field = metric_field(metric->taylor, metric->amplitude);
    ric = ricci_derivative(*metric);
  }
  const RicciDerivative* rp = metric ? &ric : nullptr;

  const Sums fine = accumulate(u, h, b, ball, field, rp);
  const Sums coarse = accumulate(u, h, b, ball.coarsened(), field, rp);
  PohozaevReport r = to_report(fine);
  r.curved = metric.has_value();
  r.derivative_mode = u.mode();
  const double floor = 64.0 * std::numeric_limits<double>::epsilon() * magnitude(fine);
  r.error_estimate = std::abs(r.residual - to_report(coarse).residual) + floor;
  if (u.mode() == DerivativeMode::finite_difference) {
    const Sums rough = accumulate(doubled_step(u), h, b, ball, field, rp);
    r.error_estimate += std::abs(r.residual - to_report(rough).residual);
  }
  if (metric) {
    const double c = metric->amplitude * std::max(1.0, metric->taylor.jet.max_abs());
    const double rr = ball.radius;
    r.unmodeled_remainder = c * (2.0 * std::pow(rr, 3) * sphere_area(rr) * fine[kSupDu2] +
                                 rr * rr * ball_volume(rr) * fine[kSupDu2] +
                                 std::pow(rr, 4) * ball_volume(rr) * fine[kSupD2u]);
  }
  return r;
}

ScalarField exact_source(const ScalarField& u, const ScalarField& h, const std::optional<CurvedMetric>& metric) {
  std::optional<MetricField> field;
  RicciDerivative ric{};
  if (metric) {
    field = metric_field(metric->taylor, metric->amplitude);
    ric = ricci_derivative(*metric);
  }
  auto value = [u, h, field, ric, curved = metric.has_value()](const Point& x) {
    const Jet uj = u.jet(x, 4);
    std::array<Jet, kDim> du;
    for (int i = 0; i < kDim; ++i) du[i] = uj.d(i);
    double bilap = 0.0, lower = 0.0;
    if (!curved) {
      Jet lap = Jet::constant(0.0, 2);
      for (int i = 0; i < kDim; ++i) lap += du[i].d(i);
      for (int i = 0; i < kDim; ++i) bilap += lap.partial(unit2(i, i));
    } else {
      const MetricJet g_inv = inverse_metric_jet(field->jet(x, 3));
      Jet lap = Jet::constant(0.0, 2);
      for (int i = 0; i < kDim; ++i)
        for (int j = 0; j < kDim; ++j) lap += (g_inv[i][j] * du[j]).d(i);
      for (int i = 0; i < kDim; ++i)
        for (int j = 0; j < kDim; ++j) bilap += (g_inv[i][j].truncated(1) * lap.d(j)).d(i).value();
      // d_i(S_{ij,l} x^l d_j u) = S_{ij,i} d_j u + S_{ij,l} x^l d_ij u
      for (int i = 0; i < kDim; ++i)
        for (int j = 0; j < kDim; ++j)
          for (int l = 0; l < kDim; ++l) {
            const double s = ric[(i * kDim + j) * kDim + l];
            if (l == i) lower += s * du[j].value();
            lower += s * x[l] * uj.partial(unit2(i, j));
          }
    }
    return h(x) * std::exp(4.0 * uj.value()) - 0.5 * (bilap + 2.0 * lower);
  };
  return ScalarField::sampled(value, Box::unbounded(), 1e-3);
}

std::string PohozaevReport::to_json() const {
  nlohmann::json j;
  j["I0"] = i0;
  j["I1"] = i1;
  j["I2"] = i2;
  j["I3"] = i3;
  j["I4"] = i4;
  j["residual"] = residual;
  j["I1_parts"] = {{"source", i1_parts.source},
                   {"third", i1_parts.third},
                   {"gradient", i1_parts.gradient},
                   {"hessian", i1_parts.hessian},
                   {"square", i1_parts.square}};
  j["I2_metric"] = i2_metric;
  j["I2_source"] = i2_source;
  j["error_estimate"] = error_estimate;
  j["unmodeled_remainder"] = unmodeled_remainder;
  j["derivative_mode"] = to_string(derivative_mode);
  j["curved"] = curved;
  return j.dump(2);
}

std::string PohozaevReport::csv_header() { return "parameter,I0,I1,I2,I3,I4,residual,error_estimate"; }

std::string PohozaevReport::csv_row(double parameter) const {
  std::ostringstream os;
  os.precision(17);
  os << parameter << ',' << i0 << ',' << i1 << ',' << i2 << ',' << i3 << ',' << i4 << ',' << residual << ','
     << error_estimate;
  return os.str();
}

EnergyBalance energy_balance(const ScalarField& u, const ScalarField& h, const std::vector<double>& radii,
                             const Point& center, int n_r, int n_t, int n_phi) {
  EnergyBalance e;
  for (double radius : radii) {
    BallDomain ball = BallDomain::make(radius, center, n_r, n_t, n_phi, std::max(0, static_cast<int>(std::log2(radius)) + 4));
    double alpha = 0.0;
    for (std::size_t i = 0; i < ball.radial.nodes.size(); ++i) {
      const double r = ball.radial.nodes[i];
      double shell = 0.0;
      for (std::size_t k = 0; k < ball.sphere.size(); ++k) {
        Point x;
        for (int d = 0; d < kDim; ++d) x[d] = center[d] + r * ball.sphere.nodes[k][d];
        shell += ball.sphere.weights[k] * h(x) * std::exp(4.0 * u(x));
      }
      alpha += 2.0 * r * r * r * ball.radial.weights[i] * shell;
    }
    const NodeEvaluator eval(u, std::nullopt);
    double bnd = 0.0;
    for (std::size_t k = 0; k < ball.sphere.size(); ++k) {
      const Point& nu = ball.sphere.nodes[k];
      Point x, xi;
      for (int d = 0; d < kDim; ++d) {
        xi[d] = radius * nu[d];
        x[d] = center[d] + xi[d];
      }
      const NodeData n = eval(x);
      double dnu_lap = 0.0, dnu_radial = 0.0;  // d_nu(Delta u), d_nu(xi.grad u)
      for (int i = 0; i < kDim; ++i) {
        dnu_lap += nu[i] * n.dlap[i];
        dnu_radial += nu[i] * n.du[i];
        for (int m = 0; m < kDim; ++m) dnu_radial += nu[i] * xi[m] * n.d2u[i][m];
      }
      bnd += ball.sphere.weights[k] *
             (-dnu_lap * dot(n.du, xi) + n.lap * dnu_radial - 0.5 * radius * n.lap * n.lap);
    }
    bnd *= std::pow(radius, 3);
    e.radii.push_back(radius);
    e.alpha.push_back(alpha);
    e.boundary.push_back(bnd);
    e.difference.push_back(bnd - alpha * alpha / (16.0 * kPi2));
  }
  const std::size_t n = e.radii.size();
  if (n >= 2) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0, num = 0, den = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double lx = std::log(e.radii[i]);
      const double ly = std::log(std::max(std::abs(e.difference[i]), std::numeric_limits<double>::min()));
      sx += lx;
      sy += ly;
      sxx += lx * lx;
      sxy += lx * ly;
      num += e.difference[i] / lx;
      den += 1.0 / (lx * lx);
    }
    e.decay_exponent = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    e.log_coefficient = num / den;
  }
  return e;
}

std::string EnergyBalance::to_json() const {
  nlohmann::json j;
  j["radii"] = radii;
  j["alpha"] = alpha;
  j["boundary"] = boundary;
  j["difference"] = difference;
  j["decay_exponent"] = decay_exponent;
  j["log_coefficient"] = log_coefficient;
  return j.dump(2);
}

std::array<double, kDim> flat_boundary_functional(const ScalarField& u, const BallDomain& ball) {
  const NodeEvaluator eval(u, std::nullopt);
  std::array<double, kDim> f{};
  const double area_factor = std::pow(ball.radius, 3);
  for (std::size_t k = 0; k < ball.sphere.size(); ++k) {
    const Point& nu = ball.sphere.nodes[k];
    Point x;
    for (int d = 0; d < kDim; ++d) x[d] = ball.center[d] + ball.radius * nu[d];
    const NodeData n = eval(x);
    const double dnu_lap = dot(n.dlap, nu);
    const double w = area_factor * ball.sphere.weights[k];
    for (int a = 0; a < kDim; ++a) {
      double hess_nu = 0.0;
      for (int i = 0; i < kDim; ++i) hess_nu += n.d2u[i][a] * nu[i];
      f[a] += w * (-dnu_lap * n.du[a] + n.lap * hess_nu - 0.5 * n.lap * n.lap * nu[a]);
    }
  }
  return f;
}

std::array<double, kDim> vanishing_rate_balance(const ScalarField& h, const ScalarField& phi, const Point& at) {
  const Jet hj = h.jet(at, 1);
  if (!(hj.value() > 0.0)) throw std::domain_error("h must be positive at the evaluation point");
  const Jet pj = phi.jet(at, 1);
  std::array<double, kDim> v{};
  for (int a = 0; a < kDim; ++a) v[a] = hj.partial(unit(a)) / hj.value() + 4.0 * pj.partial(unit(a));
  return v;
}

std::string RadialThirdDerivative::matching() const {
  if (corrected_matches && displayed_matches) return "both";
  if (corrected_matches) return "corrected";
  if (displayed_matches) return "displayed";
  return "neither";
}

RadialThirdDerivative radial_third_derivative(const RadialProfile& f, const Point& y, int i, int m, int l,
                                              double tolerance) {
  if (i < 0 || i >= kDim || m < 0 || m >= kDim || l < 0 || l >= kDim)
    throw std::out_of_range("index out of range");
  const double r = std::sqrt(y[0] * y[0] + y[1] * y[1] + y[2] * y[2] + y[3] * y[3]);
  if (!(r > 0.0)) throw std::invalid_argument("radial third derivative is undefined at the origin");
  const auto [f0, f1, f2, f3] = f(r);
  (void)f0;
  auto delta = [](int a, int b) { return a == b ? 1.0 : 0.0; };
  const double yyy = y[i] * y[m] * y[l] / (r * r * r);
  const double a = f2 - f1 / r;
  const double cubic = (f3 - 3.0 * f2 / r + 3.0 * f1 / (r * r)) * yyy;
  const double pair = a * (delta(i, l) * y[m] + delta(i, m) * y[l]) / (r * r);

  RadialThirdDerivative out;
  out.corrected = cubic + pair + a * delta(m, l) * y[i] / (r * r);
  // Grouped form: (f''' - f''/r + f'/r^2) yyy/r^3 + a ((d_il y_m + y_l d_im) r^2 - 2 yyy)/r^4 + (f'' - f') d_ml y_i / r^2
  out.displayed = (f3 - f2 / r + f1 / (r * r)) * yyy +
                  a * ((delta(i, l) * y[m] + y[l] * delta(i, m)) * r * r - 2.0 * y[i] * y[m] * y[l]) / std::pow(r, 4) +
                  (f2 - f1) * delta(m, l) * y[i] / (r * r);

  const double step = 1e-2 * std::min(1.0, r);
  auto value = [&f](const Point& p, double* v) {
    v[0] = f(std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2] + p[3] * p[3]))[0];
  };
  const Jet fd = finite_difference_jets(value, 1, y, step, 3)[0];
  MultiIndex alpha{};
  ++alpha[i];
  ++alpha[m];
  ++alpha[l];
  out.finite_difference = fd.partial(alpha);
  const double scale = std::max(1.0, std::abs(out.finite_difference));
  out.corrected_matches = std::abs(out.corrected - out.finite_difference) <= tolerance * scale;
  out.displayed_matches = std::abs(out.displayed - out.finite_difference) <= tolerance * scale;
  return out;
}

}  // namespace qlab
