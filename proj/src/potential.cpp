#include "qlab/potential.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "qlab/bubble.hpp"
#include "qlab/parallel.hpp"
#include "qlab/quadrature.hpp"

namespace qlab {

namespace {

constexpr double kPi2 = std::numbers::pi * std::numbers::pi;

double smooth_step(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  double a = std::exp(-1.0 / t), b = std::exp(-1.0 / (1.0 - t));
  return a / (a + b);
}

// 1 on |w| <= a/2, 0 on |w| >= a, smooth in between.
double patch_weight(double dist, double a) { return 1.0 - smooth_step(2.0 * dist / a - 1.0); }

double kernel(const Point& w, const PotentialQuery& q) {
  double n2 = w[0] * w[0] + w[1] * w[1] + w[2] * w[2] + w[3] * w[3];
  switch (q.kind) {
    case PotentialKind::value: return -std::log(n2) / (8.0 * kPi2);
    case PotentialKind::gradient: return -w[q.i] / (4.0 * kPi2 * n2);
    case PotentialKind::laplacian: return -1.0 / (2.0 * kPi2 * n2);
    case PotentialKind::hessian:
      return -((q.i == q.j ? n2 : 0.0) - 2.0 * w[q.i] * w[q.j]) / (4.0 * kPi2 * n2 * n2);
    case PotentialKind::grad_laplacian: return w[q.i] / (kPi2 * n2 * n2);
  }
  return 0.0;
}

double norm(const Point& x) { return std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2] + x[3] * x[3]); }

Rule1D radial_rule(double cutoff, const std::vector<double>& extra, int n) {
  std::vector<double> breaks{0.0};
  for (double r = 0.5; r < cutoff; r *= 2.0) breaks.push_back(r);
  breaks.push_back(cutoff);
  for (double e : extra)
    if (e > 0.0 && e < cutoff) breaks.push_back(e);
  std::sort(breaks.begin(), breaks.end());
  std::vector<double> clean{breaks.front()};
  for (double b : breaks)
    if (b - clean.back() > 1e-9 * std::max(1.0, b)) clean.push_back(b);
  return composite_gauss_legendre(n, clean);
}

// sum over a polar rule about `center`: f(y) * r^3 * weights.
template <class F>
double polar_sum(const Point& center, const Rule1D& radial, const SphereRule& sphere, F f) {
  return parallel_sum(radial.nodes.size(), [&](std::size_t i) {
    double r = radial.nodes[i], jac = r * r * r * radial.weights[i];
    double s = 0.0;
    for (std::size_t k = 0; k < sphere.size(); ++k) {
      Point y;
      for (int d = 0; d < kDim; ++d) y[d] = center[d] + r * sphere.nodes[k][d];
      s += sphere.weights[k] * f(y);
    }
    return jac * s;
  });
}

}  // namespace

Density Density::bubble(double height, double tail_tolerance) {
  RescaledBubble rb(height);
  const double rho = rb.rho();
  // Relative tail beyond R is 3/(1+T)^2 - 2/(1+T)^3 with T = rho R^2.
  double t = std::sqrt(3.0 / tail_tolerance);
  double cutoff = std::sqrt(t / rho);
  double big_t = rho * cutoff * cutoff;
  double total = height * kPi2 / (6.0 * rho * rho);
  Density d;
  d.fn = [height, rho](const Point& y) {
    double r2 = y[0] * y[0] + y[1] * y[1] + y[2] * y[2] + y[3] * y[3];
    return height * std::pow(1.0 + rho * r2, -4);
  };
  d.cutoff = cutoff;
  d.truncation_mass = total * (3.0 / std::pow(1.0 + big_t, 2) - 2.0 / std::pow(1.0 + big_t, 3));
  return d;
}

std::string to_string(PotentialKind k) {
  switch (k) {
    case PotentialKind::value: return "value";
    case PotentialKind::gradient: return "gradient";
    case PotentialKind::laplacian: return "laplacian";
    case PotentialKind::hessian: return "hessian";
    case PotentialKind::grad_laplacian: return "grad_laplacian";
  }
  return "unknown";
}

PotentialRule PotentialRule::refined() const {
  PotentialRule r = *this;
  r.radial_nodes *= 2;
  r.sphere_t *= 2;
  r.sphere_phi *= 2;
  return r;
}

double potential(const Density& rho, const Point& x, PotentialQuery q, const PotentialRule& rule) {
  if (!rho.fn || !(rho.cutoff > 0.0)) throw std::invalid_argument("density needs a function and a positive cutoff");
  if (q.i < 0 || q.i >= kDim || q.j < 0 || q.j >= kDim) throw std::out_of_range("potential component out of range");
  const double rx = norm(x);
  const double a = std::max(rule.min_patch, 0.5 * rx);
  const SphereRule sphere = SphereRule::product(rule.sphere_t, rule.sphere_phi);

  // Patch around x, polar about x.
  Rule1D patch_radial = composite_gauss_legendre(rule.radial_nodes, {0.0, 0.5 * a, a});
  double inner = polar_sum(x, patch_radial, sphere, [&](const Point& y) {
    if (norm(y) > rho.cutoff) return 0.0;
    Point w;
    for (int d = 0; d < kDim; ++d) w[d] = x[d] - y[d];
    return patch_weight(norm(w), a) * kernel(w, q) * rho.fn(y);
  });

  // Remainder, polar about the origin.
  Rule1D radial = radial_rule(rho.cutoff, {rx - a, rx - 0.5 * a, rx, rx + 0.5 * a, rx + a}, rule.radial_nodes);
  double outer = polar_sum({}, radial, sphere, [&](const Point& y) {
    Point w;
    for (int d = 0; d < kDim; ++d) w[d] = x[d] - y[d];
    double cut = 1.0 - patch_weight(norm(w), a);
    return cut == 0.0 ? 0.0 : cut * kernel(w, q) * rho.fn(y);
  });

  double total = inner + outer;
  if (q.kind == PotentialKind::value) {
    Rule1D r0 = radial_rule(rho.cutoff, {}, rule.radial_nodes);
    total += polar_sum({}, r0, sphere, [&](const Point& y) { return std::log(norm(y)) * rho.fn(y); }) / (4.0 * kPi2);
  }
  return total;
}

double log_potential(const Density& rho, const Point& x, const PotentialRule& rule) {
  return potential(rho, x, {PotentialKind::value, 0, 0}, rule);
}

double potential_derivative(const Density& rho, const Point& x, PotentialQuery q, const PotentialRule& rule) {
  if (q.kind == PotentialKind::value) throw std::invalid_argument("potential_derivative needs a derivative kind");
  return potential(rho, x, q, rule);
}

double density_mass(const Density& rho, const PotentialRule& rule) {
  const SphereRule sphere = SphereRule::product(rule.sphere_t, rule.sphere_phi);
  return polar_sum({}, radial_rule(rho.cutoff, {}, rule.radial_nodes), sphere, rho.fn);
}

}  // namespace qlab
