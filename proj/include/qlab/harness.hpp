#pragma once

// Synthetic bubbling sequences and the estimate checks run on them.
//
// The sequences are u_eps(x) = -log eps - log(1 + rho |x|^2 / eps^2) + w(x)
// for a smooth correction w; they stand in for genuine solution sequences,
// which no code here produces.

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "qlab/bubble.hpp"
#include "qlab/fields.hpp"
#include "qlab/torus.hpp"

namespace qlab {

enum class CorrectionKind { none, cosine, vanishing };
std::string to_string(CorrectionKind k);
CorrectionKind correction_kind_from_string(const std::string& s);

struct BubblingSequenceConfig {
  std::vector<double> eps_list{1e-2, 1e-3, 1e-4, 1e-5};
  double height = 1.0;
  // w = a cos(k.x) for cosine, a (1 - cos(k.x)) for vanishing.
  CorrectionKind correction = CorrectionKind::none;
  double correction_amplitude = 0.0;
  Point correction_wave{1.0, 0.0, 0.0, 0.0};
  double delta1 = 1.0;
  double tau = 0.5;
  double sigma = 0.9;
  int n_r = 12;   // radial nodes per panel
  int n_t = 6;    // sphere rule
  int n_phi = 12;

  // Throws std::invalid_argument unless eps_list is strictly decreasing and
  // positive, H > 0, 0 < tau < 1, tau/2 + 1/2 < sigma < 1, delta1 > 0, and the
  // correction keeps e^{4u} finite.
  void validate() const;
};

struct SyntheticBubble {
  double eps = 0.0;
  double small_radius = 0.0;  // l = -eps log eps
  double large_radius = 0.0;  // L = -log eps
  BubbleParams bubble;
  ScalarField u;           // original coordinates
  ScalarField correction;  // w
};

std::vector<SyntheticBubble> synth_sequence(const BubblingSequenceConfig& cfg);

struct AlphaRow {
  double eps = 0.0;
  double large_radius = 0.0;
  double alpha = 0.0;          // 2 int_{B(l)} H e^{4u}
  double deviation = 0.0;      // alpha - 16 pi^2
  double error_estimate = 0.0;
};

struct AlphaSweep {
  std::vector<AlphaRow> rows;
  double inverse_l_slope = 0.0;     // b in |deviation| ~ b / L, least squares through the origin
  double inverse_l_residual = 0.0;  // rms misfit of that fit relative to rms |deviation|
  double power_exponent = 0.0;      // slope of log|deviation| against log L
  bool faster_than_inverse_l = false;
  std::string note;

  std::string csv() const;  // eps,L,alpha,deviation,error_estimate
};

AlphaSweep alpha_sweep(const std::vector<SyntheticBubble>& seq, const BubblingSequenceConfig& cfg);

struct RingQuantity {
  double value = 0.0;
  double target = 0.0;
  double spread = 0.0;  // max deviation of the ring samples from their mean
  double relative_error() const;
};

struct LongRangeReport {
  double large_radius = 0.0;
  RingQuantity slope;         // d v / d log r, fitted over [L, delta1 / eps]
  RingQuantity radial;        // d_r v * L
  RingQuantity laplacian;     // Delta v * L^2
  RingQuantity d_laplacian;   // d_r Delta v * L^3
  double next_order_band = 0.0;  // 1 / L
};

// v(y) = u(eps y) + log eps on the ring |y| = L = -log eps; targets use alpha.
// Throws std::out_of_range when the ring does not fit inside delta1 / eps.
LongRangeReport long_range_checks(const ScalarField& u, double eps, double delta1,
                                  double alpha = 16.0 * 9.869604401089358, int n_t = 6, int n_phi = 12);

struct MainEstRow {
  double eps = 0.0;
  double c1 = 0.0;          // sup |u - U| / d^tau over eps <= d <= delta1
  double core_ratio = 0.0;  // sup_{d < eps} |u - U| / eps^tau
  bool peaks_at_core = false;
  double error_estimate = 0.0;  // change in c1 when the radial sampling is halved
};

struct MainEstFit {
  std::vector<MainEstRow> rows;
  double ratio = 0.0;  // max c1 / min c1
  std::string verdict;  // "zero", "stable" or "unstable"
  bool conforming = true;  // false when the sup sits at the core and grows like eps^-tau

  std::string csv() const;  // eps,c1,core_ratio,peaks_at_core,error_estimate
};

MainEstFit mainest_fit(const std::vector<SyntheticBubble>& seq, const BubblingSequenceConfig& cfg,
                       double stable_ratio = 3.0);

struct UnsupportedError : std::logic_error {
  using std::logic_error::logic_error;
};

struct VrateSetup {
  TorusSpectralField h{1.0, 8};
  TorusSpectralField b{1.0, 8};
  std::vector<Point> bubbles{Point{}};
  int green_modes = 16;          // truncation of the Green's function for the cross-term surrogate
  std::vector<double> eps;       // displacement sweep; empty for none
  double tau = 0.5;
  Point shift{1.0, 0.0, 0.0, 0.0};
};

struct VrateRow {
  double eps = 0.0;
  double magnitude = 0.0;
  double error_estimate = 0.0;
};

struct VrateReport {
  std::array<double, kDim> balance{};         // grad h / h + 4 grad phi + 64 pi^2 grad_1 beta
  std::array<double, kDim> log_gradient_h{};  // grad h / h
  std::array<double, kDim> four_grad_phi{};
  std::array<double, kDim> beta_gradient{};   // 64 pi^2 grad_1 beta(q, q)
  double magnitude = 0.0;
  // Change in the cross term when its difference step is doubled; the other
  // terms are exact derivatives of trigonometric sums.
  double error_estimate = 0.0;
  std::vector<VrateRow> sweep;    // balance at q + eps^{tau/2} shift
  double sweep_exponent = 0.0;    // fitted exponent in eps

  std::string csv() const;  // eps,magnitude,error_estimate
};

// Single-bubble balance on the torus. Throws UnsupportedError for more than
// one bubble and std::domain_error if h <= 0 at the bubble.
VrateReport vrate_pipeline(const VrateSetup& setup);

// h = h0 + a sin(k.x) and a single sine mode b tuned so that
// 4 grad phi(0) = -grad h(0) / h(0).
std::pair<TorusSpectralField, TorusSpectralField> tuned_vrate_pair(double side, int modes_per_axis, const Mode& k,
                                                                   double h0, double a);

}  // namespace qlab
