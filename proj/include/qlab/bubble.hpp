#pragma once

// Standard bubbles -log(1 + rho |y|^2) on R^4, the kernel of their
// linearization, and comparison primitives.

#include <functional>
#include <optional>
#include <vector>

#include "qlab/cnc.hpp"
#include "qlab/fields.hpp"

namespace qlab {

inline constexpr double kMinHeight = 1e-3;

// Bubble centred at `center` with scale eps and height H, in original coordinates.
struct BubbleParams {
  Point center{};
  double eps = 1.0;
  double height = 1.0;

  // Throws std::invalid_argument unless eps > 0 and height >= min_height.
  void validate(double min_height = kMinHeight) const;
};

double bubble_rho(double height);

// Radial profile U(y) = -log(1 + rho |y|^2) and its closed-form radial data.
class RescaledBubble {
public:
  explicit RescaledBubble(double height = 1.0);

  double height() const { return height_; }
  double rho() const { return rho_; }

  double value(double r) const;
  double d_r(double r) const;
  double laplacian(double r) const;
  double d_r_laplacian(double r) const;
  double bilaplacian(double r) const;

  // U on Cartesian jets, centred at `center`.
  Jet eval(const JetPoint& y, const Point& center = {}) const;
  ScalarField field(const Point& center = {}) const;

private:
  double height_;
  double rho_;
};

// U_{p,eps,H} at Euclidean distance d from the centre.
double bubble_eval(const BubbleParams& b, double d);
// U(y) - log(eps) with y = d / eps; equal to bubble_eval up to rounding.
double bubble_eval_rescaled(const BubbleParams& b, double d);

// Bilaplacian of a jet of order 4 at its base point.
double bilaplacian(const Jet& f);
// Flat Laplacian of a jet of order >= 2 at its base point.
double flat_laplacian(const Jet& f);

// Delta^2 U - 2 H e^{4U}, with the fourth derivatives taken from Cartesian jets.
double bubble_pde_residual(const RescaledBubble& rb, const Point& y);

struct KernelElement {
  int index = 0;  // 0 for the dilation mode, 1..4 for translations
  double rho = bubble_rho(1.0);

  Jet eval(const JetPoint& y) const;
  double value(const Point& y) const;
};

// Delta^2 psi - 8 H e^{4U} psi for the bubble with the same rho.
double linearized_residual(const KernelElement& k, const Point& y);

// 2 H times the integral of e^{4U} over B_R, by adaptive radial quadrature.
// Throws std::runtime_error if the quadrature does not converge.
double mass_integral(const RescaledBubble& rb, double radius);

// P_g U - 2 H e^{4U} for the blow-up metric g(y) of `jet` at scale eps,
// i.e. delta + eps^2/3 R0 yy + eps^3/6 R1 yyy. Throws std::out_of_range when
// |y| exceeds taylor_radius / eps.
double perturbed_paneitz_residual(const RescaledBubble& rb, const CurvatureJet& jet, double eps, const Point& y,
                                  double taylor_radius = 0.5);

struct BarrierResult {
  bool admissible = false;
  double minimal_c = 0.0;  // smallest C for which the barrier inequality holds on the samples
  double worst_radius = 0.0;
  std::size_t samples = 0;
};

// Looks for C <= c_max with Delta T <= -|Delta v - Delta U| on inner <= |y| <= outer,
// where T = C (1 + 1/|y|) and Delta T = -C |y|^{-3} on R^4 minus the origin.
BarrierResult barrier_check(const ScalarField& v, const RescaledBubble& rb, double inner, double outer,
                            double c_max, int n_radii = 64);

struct WeightedNorm {
  double sup = 0.0;            // sup of |u - U| / d^tau over eps <= d <= radius
  double core_sup = 0.0;       // sup of |u - U| over d < eps
  double core_ratio = 0.0;     // core_sup / eps^tau
  double argmax_distance = 0.0;
  // True when the sup sits on the inner boundary d = eps and grows like eps^{-tau};
  // the perturbation does not vanish at the centre.
  bool peaks_at_core = false;
  std::size_t samples = 0;
};

WeightedNorm weighted_sup_norm(const ScalarField& u, const BubbleParams& b, double tau, double radius,
                               int n_radii = 48);

}  // namespace qlab
