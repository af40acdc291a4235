#pragma once

// Logarithmic potentials on R^4:
//   v(x) = 1/(4 pi^2) int log(|y| / |x - y|) rho(y) dy
// and their derivatives through the differentiated kernels.

#include <functional>
#include <string>

#include "qlab/fields.hpp"

namespace qlab {

struct Density {
  std::function<double(const Point&)> fn;
  double cutoff = 0.0;          // integration is restricted to |y| <= cutoff
  double truncation_mass = 0.0;  // estimate of |int_{|y|>cutoff} rho|

  // H e^{4U} for the standard bubble, truncated where the relative tail mass
  // drops below tail_tolerance.
  static Density bubble(double height, double tail_tolerance = 1e-12);
};

enum class PotentialKind { value, gradient, laplacian, hessian, grad_laplacian };

struct PotentialQuery {
  PotentialKind kind = PotentialKind::value;
  int i = 0;  // component for gradient, hessian and grad_laplacian
  int j = 0;  // second component for hessian
};

std::string to_string(PotentialKind k);

struct PotentialRule {
  int radial_nodes = 12;      // Gauss-Legendre nodes per radial panel
  int sphere_t = 12;          // Gauss-Legendre nodes in t = sin^2 on S^3
  int sphere_phi = 16;        // trapezoid nodes per angle on S^3
  double min_patch = 1.0;     // smallest radius of the singular patch around x

  PotentialRule refined() const;  // doubles every node count
};

// Evaluates the requested derivative of v at x. The integrand is split by a
// smooth partition of unity: a patch of radius max(min_patch, |x|/2) around x
// in polar coordinates centred at x, and the rest in polar coordinates about
// the origin.
double potential(const Density& rho, const Point& x, PotentialQuery q = {}, const PotentialRule& rule = {});

double log_potential(const Density& rho, const Point& x, const PotentialRule& rule = {});

double potential_derivative(const Density& rho, const Point& x, PotentialQuery q, const PotentialRule& rule = {});

// Total mass int rho over |y| <= cutoff.
double density_mass(const Density& rho, const PotentialRule& rule = {});

}  // namespace qlab
