#include "qlab/bubble.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>

#include <cmath>
#include <memory>
#include <numbers>
#include <stdexcept>

#include "qlab/curvature.hpp"
#include "qlab/quadrature.hpp"

namespace qlab {

namespace {

MultiIndex twice(int i, int j) {
  MultiIndex m{0, 0, 0, 0};
  m[i] += 2;
  m[j] += 2;
  return m;
}

Jet radius_sq(const JetPoint& y, const Point& center) {
  Jet s = Jet::constant(0.0, y[0].order());
  for (int i = 0; i < kDim; ++i) {
    Jet d = y[i] - center[i];
    s += d * d;
  }
  return s;
}

std::vector<Point> shell_directions() {
  SphereRule s = SphereRule::product(3, 4);
  return s.nodes;
}

Point along(const Point& center, const Point& dir, double r) {
  Point p;
  for (int i = 0; i < kDim; ++i) p[i] = center[i] + r * dir[i];
  return p;
}

std::vector<double> log_spaced(double lo, double hi, int n) {
  std::vector<double> r(n);
  for (int k = 0; k < n; ++k) r[k] = n == 1 ? lo : lo * std::pow(hi / lo, double(k) / (n - 1));
  return r;
}

}  // namespace

void BubbleParams::validate(double min_height) const {
  if (!(eps > 0.0)) throw std::invalid_argument("bubble scale eps must be positive");
  if (!(height >= min_height)) throw std::invalid_argument("bubble height below the admissible lower bound");
}

double bubble_rho(double height) { return std::sqrt(height) / (4.0 * std::sqrt(3.0)); }

RescaledBubble::RescaledBubble(double height) : height_(height), rho_(bubble_rho(height)) {
  if (!(height > 0.0)) throw std::invalid_argument("bubble height must be positive");
}

double RescaledBubble::value(double r) const { return -std::log1p(rho_ * r * r); }

double RescaledBubble::d_r(double r) const { return -2.0 * rho_ * r / (1.0 + rho_ * r * r); }

double RescaledBubble::laplacian(double r) const {
  double t = rho_ * r * r;
  return -4.0 * rho_ * (2.0 + t) / ((1.0 + t) * (1.0 + t));
}

double RescaledBubble::d_r_laplacian(double r) const {
  double t = rho_ * r * r;
  return 8.0 * rho_ * rho_ * r * (3.0 + t) / std::pow(1.0 + t, 3);
}

double RescaledBubble::bilaplacian(double r) const {
  double t = rho_ * r * r;
  return 96.0 * rho_ * rho_ / std::pow(1.0 + t, 4);
}

Jet RescaledBubble::eval(const JetPoint& y, const Point& center) const {
  return -log(1.0 + rho_ * radius_sq(y, center));
}

ScalarField RescaledBubble::field(const Point& center) const {
  RescaledBubble self = *this;
  return ScalarField::analytic([self, center](const JetPoint& y) { return self.eval(y, center); });
}

double bubble_eval(const BubbleParams& b, double d) {
  if (d < 0.0) throw std::invalid_argument("distance must be non-negative");
  return -std::log(b.eps + bubble_rho(b.height) * d * d / b.eps);
}

double bubble_eval_rescaled(const BubbleParams& b, double d) {
  if (d < 0.0) throw std::invalid_argument("distance must be non-negative");
  return RescaledBubble(b.height).value(d / b.eps) - std::log(b.eps);
}

double bilaplacian(const Jet& f) {
  double s = 0.0;
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j) s += f.partial(twice(i, j));
  return s;
}

double flat_laplacian(const Jet& f) {
  double s = 0.0;
  for (int i = 0; i < kDim; ++i) {
    MultiIndex m{0, 0, 0, 0};
    m[i] = 2;
    s += f.partial(m);
  }
  return s;
}

double bubble_pde_residual(const RescaledBubble& rb, const Point& y) {
  Jet u = rb.eval(jet_point(y, 4));
  return bilaplacian(u) - 2.0 * rb.height() * std::exp(4.0 * u.value());
}

Jet KernelElement::eval(const JetPoint& y) const {
  if (index < 0 || index > 4) throw std::out_of_range("kernel element index must be in 0..4");
  Jet q = rho * radius_sq(y, {});
  if (index == 0) return (1.0 - q) / (1.0 + q);
  return y[index - 1] / (1.0 + q);
}

double KernelElement::value(const Point& y) const { return eval(jet_point(y, 0)).value(); }

double linearized_residual(const KernelElement& k, const Point& y) {
  Jet psi = k.eval(jet_point(y, 4));
  double height = 48.0 * k.rho * k.rho;
  double r2 = 0.0;
  for (double c : y) r2 += c * c;
  double e4u = std::pow(1.0 + k.rho * r2, -4);
  return bilaplacian(psi) - 4.0 * 2.0 * height * e4u * psi.value();
}

double mass_integral(const RescaledBubble& rb, double radius) {
  if (radius < 0.0) throw std::invalid_argument("radius must be non-negative");
  if (radius == 0.0) return 0.0;
  const double rho = rb.rho();
  auto integrand = [](double r, void* p) {
    double rho = *static_cast<double*>(p);
    return r * r * r * std::pow(1.0 + rho * r * r, -4);
  };
  gsl_function f;
  f.function = +integrand;
  f.params = const_cast<double*>(&rho);
  std::unique_ptr<gsl_integration_workspace, decltype(&gsl_integration_workspace_free)> ws(
      gsl_integration_workspace_alloc(1000), &gsl_integration_workspace_free);
  double result = 0.0, abserr = 0.0;
  gsl_error_handler_t* old = gsl_set_error_handler_off();
  int status = gsl_integration_qag(&f, 0.0, radius, 0.0, 1e-13, 1000, GSL_INTEG_GAUSS61, ws.get(), &result, &abserr);
  gsl_set_error_handler(old);
  if (status != GSL_SUCCESS)
    throw std::runtime_error(std::string("mass quadrature did not converge: ") + gsl_strerror(status));
  return 2.0 * rb.height() * sphere_area(1.0) * result;
}

double perturbed_paneitz_residual(const RescaledBubble& rb, const CurvatureJet& jet, double eps, const Point& y,
                                  double taylor_radius) {
  double r = std::sqrt(y[0] * y[0] + y[1] * y[1] + y[2] * y[2] + y[3] * y[3]);
  if (eps > 0.0 && r > taylor_radius / eps) throw std::out_of_range("point lies outside the Taylor validity radius");
  MetricField g = metric_field(metric_taylor_from_jet(jet.blow_up(Rational(eps))));
  return paneitz_apply(g, rb.field(), y) - 2.0 * rb.height() * std::exp(4.0 * rb.value(r));
}

BarrierResult barrier_check(const ScalarField& v, const RescaledBubble& rb, double inner, double outer, double c_max,
                            int n_radii) {
  if (!(inner > 0.0 && outer >= inner)) throw std::invalid_argument("barrier annulus must satisfy 0 < inner <= outer");
  BarrierResult out;
  const auto dirs = shell_directions();
  for (double r : log_spaced(inner, outer, n_radii))
    for (const auto& dir : dirs) {
      Point y = along({}, dir, r);
      double gap = std::abs(flat_laplacian(v.jet(y, 2)) - rb.laplacian(r));
      double need = gap * r * r * r;
      if (need > out.minimal_c) {
        out.minimal_c = need;
        out.worst_radius = r;
      }
      ++out.samples;
    }
  out.admissible = out.minimal_c <= c_max;
  return out;
}

WeightedNorm weighted_sup_norm(const ScalarField& u, const BubbleParams& b, double tau, double radius, int n_radii) {
  if (!(tau > 0.0 && tau < 1.0)) throw std::invalid_argument("tau must lie in (0, 1)");
  if (!(radius > b.eps)) throw std::invalid_argument("radius must exceed the bubble scale");
  b.validate();
  const auto dirs = shell_directions();
  WeightedNorm out;
  double inner_shell = 0.0, outer_shells = 0.0;
  const auto radii = log_spaced(b.eps, radius, n_radii);
  for (std::size_t k = 0; k < radii.size(); ++k) {
    double d = radii[k];
    for (const auto& dir : dirs) {
      double ratio = std::abs(u(along(b.center, dir, d)) - bubble_eval(b, d)) / std::pow(d, tau);
      if (ratio > out.sup) {
        out.sup = ratio;
        out.argmax_distance = d;
      }
      if (k == 0) inner_shell = std::max(inner_shell, ratio);
      else if (d >= 2.0 * b.eps) outer_shells = std::max(outer_shells, ratio);
      ++out.samples;
    }
  }
  for (int k = 0; k < 8; ++k) {
    double d = b.eps * k / 8.0;
    for (const auto& dir : dirs) {
      out.core_sup = std::max(out.core_sup, std::abs(u(along(b.center, dir, d)) - bubble_eval(b, d)));
      ++out.samples;
    }
  }
  out.core_ratio = out.core_sup / std::pow(b.eps, tau);
  out.peaks_at_core = inner_shell > 1.01 * outer_shells;
  return out;
}

}  // namespace qlab
