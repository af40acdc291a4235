#include "qlab/quadrature.hpp"

#include <gsl/gsl_integration.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qlab {

Rule1D gauss_legendre(int n, double a, double b) {
  if (n < 1) throw std::invalid_argument("Gauss-Legendre needs at least one node");
  gsl_integration_glfixed_table* table = gsl_integration_glfixed_table_alloc(static_cast<size_t>(n));
  if (!table) throw std::runtime_error("gsl_integration_glfixed_table_alloc failed");
  Rule1D r;
  r.nodes.resize(n);
  r.weights.resize(n);
  for (int i = 0; i < n; ++i) gsl_integration_glfixed_point(a, b, static_cast<size_t>(i), &r.nodes[i], &r.weights[i], table);
  gsl_integration_glfixed_table_free(table);
  return r;
}

Rule1D composite_gauss_legendre(int n_per_panel, const std::vector<double>& breaks) {
  Rule1D r;
  for (std::size_t k = 0; k + 1 < breaks.size(); ++k) {
    Rule1D p = gauss_legendre(n_per_panel, breaks[k], breaks[k + 1]);
    r.nodes.insert(r.nodes.end(), p.nodes.begin(), p.nodes.end());
    r.weights.insert(r.weights.end(), p.weights.begin(), p.weights.end());
  }
  return r;
}

SphereRule SphereRule::product(int n_t, int n_phi) {
  SphereRule s;
  Rule1D t = gauss_legendre(n_t, 0.0, 1.0);
  const double dphi = 2.0 * std::numbers::pi / n_phi;
  for (int i = 0; i < n_t; ++i) {
    double c = std::sqrt(1.0 - t.nodes[i]), sn = std::sqrt(t.nodes[i]);
    for (int a = 0; a < n_phi; ++a) {
      // Half-step offset keeps nodes off the coordinate planes.
      double p1 = (a + 0.5) * dphi;
      for (int b = 0; b < n_phi; ++b) {
        double p2 = (b + 0.25) * dphi;
        s.nodes.push_back({c * std::cos(p1), c * std::sin(p1), sn * std::cos(p2), sn * std::sin(p2)});
        s.weights.push_back(0.5 * t.weights[i] * dphi * dphi);
      }
    }
  }
  return s;
}

BallRule BallRule::polar(double radius, int n_r, const SphereRule& sphere, const Point& center) {
  BallRule b;
  Rule1D r = gauss_legendre(n_r, 0.0, radius);
  for (int i = 0; i < n_r; ++i) {
    double rr = r.nodes[i], jac = rr * rr * rr * r.weights[i];
    for (std::size_t k = 0; k < sphere.size(); ++k) {
      Point p;
      for (int d = 0; d < kDim; ++d) p[d] = center[d] + rr * sphere.nodes[k][d];
      b.nodes.push_back(p);
      b.weights.push_back(jac * sphere.weights[k]);
    }
  }
  return b;
}

double ball_volume(double radius) { return 0.5 * std::numbers::pi * std::numbers::pi * std::pow(radius, 4); }
double sphere_area(double radius) { return 2.0 * std::numbers::pi * std::numbers::pi * std::pow(radius, 3); }

}  // namespace qlab
