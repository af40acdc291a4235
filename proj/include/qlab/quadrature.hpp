#pragma once

#include <vector>

#include "qlab/jet.hpp"

namespace qlab {

struct Rule1D {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Gauss-Legendre rule with n nodes on [a, b].
Rule1D gauss_legendre(int n, double a, double b);

// Composite Gauss-Legendre over consecutive panels [breaks[k], breaks[k+1]].
Rule1D composite_gauss_legendre(int n_per_panel, const std::vector<double>& breaks);

// Product rule on the unit 3-sphere. With t = sin^2(eta) the surface measure
// is (1/2) dt dphi1 dphi2 for the parametrization
//   (sqrt(1-t) cos phi1, sqrt(1-t) sin phi1, sqrt(t) cos phi2, sqrt(t) sin phi2).
// Gauss-Legendre in t, trapezoid in both angles. Weights sum to 2 pi^2.
struct SphereRule {
  std::vector<Point> nodes;
  std::vector<double> weights;

  static SphereRule product(int n_t, int n_phi);
  std::size_t size() const { return nodes.size(); }
};

// Polar rule on the ball of radius R centred at `center`: Gauss-Legendre in r
// with the r^3 Jacobian folded into the weights. Interior weights sum to
// pi^2 R^4 / 2.
struct BallRule {
  std::vector<Point> nodes;
  std::vector<double> weights;

  static BallRule polar(double radius, int n_r, const SphereRule& sphere, const Point& center = {});
  std::size_t size() const { return nodes.size(); }
};

double ball_volume(double radius);
double sphere_area(double radius);

}  // namespace qlab
