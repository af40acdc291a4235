#include "qlab/harness.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <numbers>

#include "qlab/parallel.hpp"
#include "qlab/quadrature.hpp"

namespace qlab {
namespace {

constexpr double kPi = std::numbers::pi;
const double kSixteenPiSq = 16.0 * kPi * kPi;

// Least-squares slope of ys against xs.
double fit_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  const double n = static_cast<double>(xs.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i] / n;
    my += ys[i] / n;
  }
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  return sxx > 0 ? sxy / sxx : 0.0;
}

Jet correction_jet(const BubblingSequenceConfig& cfg, const JetPoint& x) {
  const int order = x[0].order();
  if (cfg.correction == CorrectionKind::none || cfg.correction_amplitude == 0.0) return Jet::constant(0.0, order);
  Jet phase = Jet::constant(0.0, order);
  for (int i = 0; i < kDim; ++i) phase += x[i] * cfg.correction_wave[i];
  if (cfg.correction == CorrectionKind::cosine) return cfg.correction_amplitude * cos(phase);
  return cfg.correction_amplitude * (1.0 - cos(phase));
}

// Radial breaks 0, s, 2s, 4s, ... capped at the outer radius.
std::vector<double> doubling_breaks(double first, double outer) {
  std::vector<double> b{0.0};
  for (double r = first; r < outer; r *= 2.0) b.push_back(r);
  b.push_back(outer);
  return b;
}

double alpha_quadrature(const SyntheticBubble& s, const BubblingSequenceConfig& cfg, int n_r, int n_t, int n_phi) {
  const double rho = s.bubble.height > 0 ? bubble_rho(s.bubble.height) : 0.0;
  const Rule1D radial = composite_gauss_legendre(n_r, doubling_breaks(0.5 / std::sqrt(rho), s.large_radius));
  const SphereRule sphere = SphereRule::product(n_t, n_phi);
  const bool radial_only = cfg.correction == CorrectionKind::none || cfg.correction_amplitude == 0.0;
  double total = 0.0;
  for (std::size_t k = 0; k < radial.nodes.size(); ++k) {
    const double r = radial.nodes[k];
    const double shell = std::pow(1.0 + rho * r * r, -4.0) * r * r * r * radial.weights[k];
    if (radial_only) {
      total += shell * 2.0 * kPi * kPi;
      continue;
    }
    double ang = 0.0;
    for (std::size_t m = 0; m < sphere.size(); ++m) {
      Point x{};
      for (int i = 0; i < kDim; ++i) x[i] = s.bubble.center[i] + s.eps * r * sphere.nodes[m][i];
      ang += sphere.weights[m] * std::exp(4.0 * s.correction(x));
    }
    total += shell * ang;
  }
  return 2.0 * s.bubble.height * total;
}

// Partial derivative of v(y) = u(eps y) + log eps from a jet of u at eps y.
double scaled_partial(const Jet& j, const MultiIndex& a, double eps) {
  int order = a[0] + a[1] + a[2] + a[3];
  return j.partial(a) * std::pow(eps, order);
}

MultiIndex unit(int i) {
  MultiIndex a{};
  a[i] = 1;
  return a;
}

}  // namespace

std::string to_string(CorrectionKind k) {
  switch (k) {
    case CorrectionKind::none: return "none";
    case CorrectionKind::cosine: return "cosine";
    case CorrectionKind::vanishing: return "vanishing";
  }
  return "unknown";
}

CorrectionKind correction_kind_from_string(const std::string& s) {
  if (s == "none") return CorrectionKind::none;
  if (s == "cosine") return CorrectionKind::cosine;
  if (s == "vanishing") return CorrectionKind::vanishing;
  throw std::invalid_argument("unknown correction kind '" + s + "' (expected none, cosine or vanishing)");
}

void BubblingSequenceConfig::validate() const {
  if (eps_list.empty()) throw std::invalid_argument("eps_list is empty");
  for (std::size_t i = 0; i < eps_list.size(); ++i) {
    if (!(eps_list[i] > 0.0 && eps_list[i] < 1.0)) throw std::invalid_argument("eps_list entries must lie in (0, 1)");
    if (i > 0 && !(eps_list[i] < eps_list[i - 1])) throw std::invalid_argument("eps_list must be strictly decreasing");
  }
  if (!(height >= kMinHeight)) throw std::invalid_argument("height must be positive");
  if (!(tau > 0.0 && tau < 1.0)) throw std::invalid_argument("tau must lie in (0, 1)");
  if (!(sigma > tau / 2.0 + 0.5 && sigma < 1.0)) throw std::invalid_argument("sigma must lie in (tau/2 + 1/2, 1)");
  if (!(delta1 > 0.0)) throw std::invalid_argument("delta1 must be positive");
  if (!(delta1 > eps_list.front())) throw std::invalid_argument("delta1 must exceed every eps");
  if (n_r < 2 || n_t < 2 || n_phi < 4) throw std::invalid_argument("quadrature sizes too small");
  if (!std::isfinite(correction_amplitude)) throw std::invalid_argument("correction amplitude must be finite");
  // e^{4u} peaks at eps^{-4} e^{4 max w}; keep it well inside double range.
  const double peak = 4.0 * (2.0 * std::abs(correction_amplitude) + std::log(1.0 / eps_list.back()));
  if (peak > 700.0) throw std::invalid_argument("correction amplitude overflows e^{4u}");
}

std::vector<SyntheticBubble> synth_sequence(const BubblingSequenceConfig& cfg) {
  cfg.validate();
  std::vector<SyntheticBubble> out;
  for (double eps : cfg.eps_list) {
    SyntheticBubble s;
    s.eps = eps;
    s.large_radius = -std::log(eps);
    s.small_radius = eps * s.large_radius;
    s.bubble = BubbleParams{{}, eps, cfg.height};
    const double rho = bubble_rho(cfg.height);
    s.correction = ScalarField::analytic([cfg](const JetPoint& x) { return correction_jet(cfg, x); });
    s.u = ScalarField::analytic([cfg, eps, rho](const JetPoint& x) {
      Jet r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2] + x[3] * x[3];
      return -std::log(eps) - log(1.0 + r2 * (rho / (eps * eps))) + correction_jet(cfg, x);
    });
    out.push_back(std::move(s));
  }
  return out;
}

std::string AlphaSweep::csv() const {
  std::string s = "eps,L,alpha,deviation,error_estimate\n";
  for (const auto& r : rows)
    s += fmt::format("{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", r.eps, r.large_radius, r.alpha, r.deviation,
                     r.error_estimate);
  return s;
}

AlphaSweep alpha_sweep(const std::vector<SyntheticBubble>& seq, const BubblingSequenceConfig& cfg) {
  AlphaSweep out;
  out.rows.resize(seq.size());
  parallel_for(seq.size(), [&](std::size_t k) {
    const auto& s = seq[k];
    double fine = alpha_quadrature(s, cfg, cfg.n_r, cfg.n_t, cfg.n_phi);
    double coarse = alpha_quadrature(s, cfg, std::max(2, cfg.n_r - 4), std::max(2, cfg.n_t - 2),
                                     std::max(4, cfg.n_phi - 4));
    out.rows[k] = AlphaRow{s.eps, s.large_radius, fine, fine - kSixteenPiSq, std::abs(fine - coarse)};
  });

  std::vector<double> log_l, log_dev;
  double num = 0, den = 0, dev_sq = 0;
  for (const auto& r : out.rows) {
    double inv = 1.0 / r.large_radius, d = std::abs(r.deviation);
    num += d * inv;
    den += inv * inv;
    dev_sq += d * d;
    if (d > 0) {
      log_l.push_back(std::log(r.large_radius));
      log_dev.push_back(std::log(d));
    }
  }
  out.inverse_l_slope = den > 0 ? num / den : 0.0;
  double misfit = 0;
  for (const auto& r : out.rows) misfit += std::pow(std::abs(r.deviation) - out.inverse_l_slope / r.large_radius, 2);
  out.inverse_l_residual = dev_sq > 0 ? std::sqrt(misfit / dev_sq) : 0.0;
  if (log_l.size() >= 2) out.power_exponent = fit_slope(log_l, log_dev);
  out.faster_than_inverse_l = log_l.size() >= 2 && out.power_exponent < -1.5;
  if (out.faster_than_inverse_l)
    out.note = fmt::format("deviation decays like L^{:.2f}, faster than 1/L; the 1/L fit is a loose upper model",
                           out.power_exponent);
  else
    out.note = fmt::format("deviation decays like L^{:.2f}", out.power_exponent);
  return out;
}

double RingQuantity::relative_error() const {
  return target != 0.0 ? std::abs(value - target) / std::abs(target) : std::abs(value);
}

LongRangeReport long_range_checks(const ScalarField& u, double eps, double delta1, double alpha, int n_t, int n_phi) {
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("eps must lie in (0, 1)");
  const double big = -std::log(eps);
  const double outer = delta1 / eps;
  if (!(big < outer)) throw std::out_of_range("ring |y| = L lies outside |y| <= delta1 / eps");
  const double unit_log = alpha / (8.0 * kPi * kPi);
  const SphereRule sphere = SphereRule::product(n_t, n_phi);
  const double area = 2.0 * kPi * kPi;

  LongRangeReport out;
  out.large_radius = big;
  out.next_order_band = 1.0 / big;

  // Ring derivatives.
  std::vector<std::array<double, 3>> ring(sphere.size());
  parallel_for(sphere.size(), [&](std::size_t m) {
    const Point& dir = sphere.nodes[m];
    Point x{};
    for (int i = 0; i < kDim; ++i) x[i] = eps * big * dir[i];
    Jet j = u.jet(x, 3);
    double dr = 0, lap = 0, dr_lap = 0;
    for (int i = 0; i < kDim; ++i) {
      dr += dir[i] * scaled_partial(j, unit(i), eps);
      MultiIndex ii{};
      ii[i] = 2;
      lap += scaled_partial(j, ii, eps);
      for (int k = 0; k < kDim; ++k) {
        MultiIndex a = ii;
        a[k] += 1;
        dr_lap += dir[k] * scaled_partial(j, a, eps);
      }
    }
    ring[m] = {dr * big, lap * big * big, dr_lap * big * big * big};
  });
  auto summarize = [&](int c, double target) {
    RingQuantity q;
    q.target = target;
    for (std::size_t m = 0; m < ring.size(); ++m) q.value += sphere.weights[m] * ring[m][c] / area;
    for (const auto& r : ring) q.spread = std::max(q.spread, std::abs(r[c] - q.value));
    return q;
  };
  out.radial = summarize(0, -unit_log);
  out.laplacian = summarize(1, -2.0 * unit_log);
  out.d_laplacian = summarize(2, 4.0 * unit_log);

  // Slope of the spherical mean of v against log r.
  const int n_radii = 32;
  std::vector<double> log_r(n_radii), mean(n_radii);
  std::vector<std::vector<double>> per_dir(sphere.size(), std::vector<double>(n_radii));
  for (int k = 0; k < n_radii; ++k) {
    double r = big * std::pow(outer / big, k / double(n_radii - 1));
    log_r[k] = std::log(r);
    double s = 0;
    for (std::size_t m = 0; m < sphere.size(); ++m) {
      Point x{};
      for (int i = 0; i < kDim; ++i) x[i] = eps * r * sphere.nodes[m][i];
      double v = u(x) + std::log(eps);
      per_dir[m][k] = v;
      s += sphere.weights[m] * v / area;
    }
    mean[k] = s;
  }
  out.slope.target = -unit_log;
  out.slope.value = fit_slope(log_r, mean);
  for (const auto& vals : per_dir) out.slope.spread = std::max(out.slope.spread, std::abs(fit_slope(log_r, vals) - out.slope.value));
  return out;
}

std::string MainEstFit::csv() const {
  std::string s = "eps,c1,core_ratio,peaks_at_core,error_estimate\n";
  for (const auto& r : rows)
    s += fmt::format("{:.17g},{:.17g},{:.17g},{},{:.17g}\n", r.eps, r.c1, r.core_ratio, r.peaks_at_core ? 1 : 0,
                     r.error_estimate);
  return s;
}

MainEstFit mainest_fit(const std::vector<SyntheticBubble>& seq, const BubblingSequenceConfig& cfg,
                       double stable_ratio) {
  MainEstFit out;
  out.rows.resize(seq.size());
  parallel_for(seq.size(), [&](std::size_t k) {
    const auto& s = seq[k];
    WeightedNorm n = weighted_sup_norm(s.u, s.bubble, cfg.tau, cfg.delta1);
    WeightedNorm coarse = weighted_sup_norm(s.u, s.bubble, cfg.tau, cfg.delta1, 24);
    out.rows[k] = MainEstRow{s.eps, n.sup, n.core_ratio, n.peaks_at_core, std::abs(n.sup - coarse.sup)};
  });
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (const auto& r : out.rows) {
    lo = std::min(lo, r.c1);
    hi = std::max(hi, r.c1);
  }
  // |u - U| for the exact bubble is pure rounding, amplified by d^{-tau} <= eps^{-tau}.
  if (hi <= 1e-9) {
    out.verdict = "zero";
    out.ratio = 1.0;
    return out;
  }
  out.ratio = lo > 0 ? hi / lo : std::numeric_limits<double>::infinity();
  out.verdict = out.ratio <= stable_ratio ? "stable" : "unstable";
  out.conforming = std::none_of(out.rows.begin(), out.rows.end(), [](const MainEstRow& r) { return r.peaks_at_core; });
  return out;
}

std::string VrateReport::csv() const {
  std::string s = "eps,magnitude,error_estimate\n";
  for (const auto& r : sweep) s += fmt::format("{:.17g},{:.17g},{:.17g}\n", r.eps, r.magnitude, r.error_estimate);
  return s;
}

namespace {

struct Balance {
  std::array<double, kDim> log_h{}, phi{}, beta{}, total{};
  double error = 0.0;
};

Balance balance_at(const TorusSpectralField& h, const TorusSpectralField& phi, int green_modes, const Point& q) {
  Balance out;
  Jet hj = h.jet(q, 1);
  if (!(hj.value() > 0.0)) throw std::domain_error("h must be positive at the bubble");
  Jet pj = phi.jet(q, 1);
  TorusGreen green(h.side(), green_modes, q);
  const double step = 1e-3 * h.side();
  for (int i = 0; i < kDim; ++i) {
    out.log_h[i] = hj.partial(unit(i)) / hj.value();
    out.phi[i] = 4.0 * pj.partial(unit(i));
    // grad_1 beta(q, q): the log part of G is even about q, so a centred
    // difference of G sees only the regular part.
    Point plus = q, minus = q;
    plus[i] += step;
    minus[i] -= step;
    out.beta[i] = 64.0 * kPi * kPi * (green(plus) - green(minus)) / (2.0 * step);
    plus[i] += step;
    minus[i] -= step;
    const double wide = 64.0 * kPi * kPi * (green(plus) - green(minus)) / (4.0 * step);
    out.error = std::max(out.error, std::abs(wide - out.beta[i]));
    out.total[i] = out.log_h[i] + out.phi[i] + out.beta[i];
  }
  return out;
}

double norm(const std::array<double, kDim>& v) {
  double s = 0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace

VrateReport vrate_pipeline(const VrateSetup& setup) {
  if (setup.bubbles.size() != 1)
    throw UnsupportedError(fmt::format("{} bubbles requested; only a single bubble is supported", setup.bubbles.size()));
  const Point q = setup.bubbles.front();
  const TorusSpectralField phi = regular_part_field(setup.b);

  VrateReport out;
  Balance b = balance_at(setup.h, phi, setup.green_modes, q);
  out.balance = b.total;
  out.log_gradient_h = b.log_h;
  out.four_grad_phi = b.phi;
  out.beta_gradient = b.beta;
  out.magnitude = norm(b.total);
  out.error_estimate = b.error;

  std::vector<double> log_eps, log_mag;
  for (double eps : setup.eps) {
    Point shifted = q;
    const double t = std::pow(eps, setup.tau / 2.0);
    for (int i = 0; i < kDim; ++i) shifted[i] += t * setup.shift[i];
    const Balance at = balance_at(setup.h, phi, setup.green_modes, shifted);
    const double m = norm(at.total);
    out.sweep.push_back({eps, m, at.error});
    if (m > 0) {
      log_eps.push_back(std::log(eps));
      log_mag.push_back(std::log(m));
    }
  }
  if (log_eps.size() >= 2) out.sweep_exponent = fit_slope(log_eps, log_mag);
  return out;
}

std::pair<TorusSpectralField, TorusSpectralField> tuned_vrate_pair(double side, int modes_per_axis, const Mode& k,
                                                                   double h0, double a) {
  if (!(h0 > std::abs(a))) throw std::invalid_argument("h0 must exceed |a| so that h stays positive");
  TorusSpectralField h = TorusSpectralField::real_mode(side, modes_per_axis, k, 0.0, a);
  h.add({0, 0, 0, 0}, h0);
  // grad h(0) / h(0) = a kappa / h0 and 4 grad phi(0) = 8 B kappa / |kappa|^4.
  const double w = h.wavenumber_sq(k);
  const double amp_b = -a * w * w / (8.0 * h0);
  TorusSpectralField b = TorusSpectralField::real_mode(side, modes_per_axis, k, 0.0, amp_b);
  return {h, b};
}

}  // namespace qlab
