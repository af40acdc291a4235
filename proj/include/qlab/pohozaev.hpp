#pragma once

// Pohozaev balances on balls for Delta_g^2 u + 2 b = 2 h e^{4u} and the
// boundary functionals derived from them.
//
// Coordinates xi are measured from the ball centre. Delta_g u = d_i(g^{ij} d_j u)
// is the divergence-form Laplacian of a unit-determinant chart. The balance
//   I0 = I1 + I2 + I3 + I4
// with
//   I0 = int (2 h e^{4u} + 1/2 xi.grad h e^{4u})
//   I1 = int_bd ( 1/2 h e^{4u} xi.nu - g^{ij} d_i(Lu) nu_j xi.grad u
//                 + g^{ij} Lu d_i u nu_j + g^{ij} Lu xi^k d_ik u nu_j - 1/2 (Lu)^2 xi.nu )
//   I2 = int ( Lu d_i g^{ij} d_j u + xi^k Lu d_ik g^{ij} d_j u + xi^k Lu d_k g^{ij} d_ij u - 2 b xi.grad u )
//   I3 = -2 int_bd S_{ij,l} d_j u d_k u xi^l xi^k nu_i
//   I4 = 2 int S_{ij,l} (xi^l d_j u d_i u + xi^k xi^l d_j u d_ik u)
// (Lu = Delta_g u, S_{ij,l} the Ricci derivative at the centre) holds exactly
// when u solves
//   Delta_g^2 u + 2 d_i(S_{ij,l} xi^l d_j u) + 2 b = 2 h e^{4u},
// the covariant Paneitz equation with its lower-order part truncated at first
// order (in conformal normal coordinates Ric(0) = 0 and the scalar gradient
// vanishes, so only the Ricci derivative survives).

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "qlab/cnc.hpp"
#include "qlab/fields.hpp"
#include "qlab/quadrature.hpp"

namespace qlab {

struct BallDomain {
  Point center{};
  double radius = 1.0;
  Rule1D radial;     // nodes in (0, radius); weights without the r^3 factor
  SphereRule sphere;  // unit-sphere rule, shared by the interior shells and the boundary

  // Gauss-Legendre with n_r nodes on each of the geometric panels
  // [R 2^{-k-1}, R 2^{-k}], k < panels, plus [0, R 2^{-panels}].
  static BallDomain make(double radius, const Point& center = {}, int n_r = 8, int n_t = 6, int n_phi = 12,
                         int panels = 6);

  double interior_weight_sum() const;  // pi^2 R^4 / 2 up to rounding
  double boundary_weight_sum() const;  // 2 pi^2 R^3 up to rounding

  // Roughly two thirds of the nodes in every direction; used for error estimates.
  BallDomain coarsened() const;

  int n_r = 8, n_t = 6, n_phi = 12, panels = 6;
};

// Curved chart: g = delta + amplitude (taylor - delta), centred at the origin.
struct CurvedMetric {
  MetricTaylor taylor;
  double amplitude = 1.0;
  double taylor_radius = 3.0;  // largest admissible ball radius
};

struct BoundaryParts {
  double source = 0.0;    // 1/2 h e^{4u} xi.nu
  double third = 0.0;     // -g^{ij} d_i(Lu) nu_j xi.grad u
  double gradient = 0.0;  // g^{ij} Lu d_i u nu_j
  double hessian = 0.0;   // g^{ij} Lu xi^k d_ik u nu_j
  double square = 0.0;    // -1/2 (Lu)^2 xi.nu
};

struct PohozaevReport {
  double i0 = 0.0, i1 = 0.0, i2 = 0.0, i3 = 0.0, i4 = 0.0;
  double residual = 0.0;  // i0 - (i1 + i2 + i3 + i4)
  BoundaryParts i1_parts;
  double i2_metric = 0.0;
  double i2_source = 0.0;
  // |residual(rule) - residual(coarser rule)| plus a rounding floor, and for
  // sampled inputs the change under doubling the difference step.
  double error_estimate = 0.0;
  // Bound on the omitted higher-order curvature terms; zero on the flat path.
  double unmodeled_remainder = 0.0;
  DerivativeMode derivative_mode = DerivativeMode::analytic;
  bool curved = false;

  std::string to_json() const;
  static std::string csv_header();  // parameter,I0,I1,I2,I3,I4,residual,error_estimate
  std::string csv_row(double parameter) const;
};

// Flat path when metric is empty. Throws std::out_of_range when the ball
// exceeds the Taylor radius, std::invalid_argument when a curved ball is not
// centred at the origin; derivative failures of the fields propagate.
PohozaevReport pohozaev_balance(const ScalarField& u, const ScalarField& h, const ScalarField& b,
                                const BallDomain& ball, const std::optional<CurvedMetric>& metric = std::nullopt);

// b making u an exact solution of the truncated equation above (flat when
// metric is empty): b = h e^{4u} - 1/2 (Delta_g^2 u + 2 d_i(S_{ij,l} xi^l d_j u)).
ScalarField exact_source(const ScalarField& u, const ScalarField& h,
                         const std::optional<CurvedMetric>& metric = std::nullopt);

struct EnergyBalance {
  std::vector<double> radii;
  std::vector<double> alpha;       // 2 int_{B_R} h e^{4u}
  std::vector<double> boundary;    // B(R)
  std::vector<double> difference;  // B(R) - alpha(R)^2 / (16 pi^2)
  double decay_exponent = 0.0;     // slope of log|difference| against log R
  double log_coefficient = 0.0;    // least-squares c in difference ~ c / log R

  std::string to_json() const;
};

// B(R) = int_{|xi|=R} ( -d_nu(Delta u) xi.grad u + Delta u d_nu(xi.grad u) - 1/2 R (Delta u)^2 )
// with the flat Laplacian.
EnergyBalance energy_balance(const ScalarField& u, const ScalarField& h, const std::vector<double>& radii,
                             const Point& center = {}, int n_r = 8, int n_t = 8, int n_phi = 16);

// F_a = int_bd ( -d_i(Delta u) d_a u nu_i + Delta u d_ia u nu_i - 1/2 (Delta u)^2 nu_a ).
std::array<double, kDim> flat_boundary_functional(const ScalarField& u, const BallDomain& ball);

// grad h / h + 4 grad phi at `at`. Throws std::domain_error if h(at) <= 0.
std::array<double, kDim> vanishing_rate_balance(const ScalarField& h, const ScalarField& phi, const Point& at = {});

// A radial profile r -> (f, f', f'', f''').
using RadialProfile = std::function<std::array<double, 4>(double)>;

struct RadialThirdDerivative {
  double corrected = 0.0;          // chain-rule closed form
  double displayed = 0.0;          // grouped form with (f'' - f') on the delta_ml y_i term
  double finite_difference = 0.0;  // order-4 stencils on f(|y|)
  bool corrected_matches = false;
  bool displayed_matches = false;

  std::string matching() const;  // "corrected", "displayed", "both" or "neither"
};

// d_i d_m d_l f(|y|). Throws std::invalid_argument at y = 0.
RadialThirdDerivative radial_third_derivative(const RadialProfile& f, const Point& y, int i, int m, int l,
                                              double tolerance = 1e-6);

}  // namespace qlab
