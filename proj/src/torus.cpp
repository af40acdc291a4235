#include "qlab/torus.hpp"

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <numbers>
#include <stdexcept>

#include "qlab/parallel.hpp"
#include "qlab/quadrature.hpp"

namespace qlab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Mode negate(const Mode& k) { return {-k[0], -k[1], -k[2], -k[3]}; }

int mode_norm_sq(const Mode& k) { return k[0] * k[0] + k[1] * k[1] + k[2] * k[2] + k[3] * k[3]; }

double phase(const Mode& k, const Point& x, double side) {
  double s = 0.0;
  for (int i = 0; i < kDim; ++i) s += k[i] * x[i];
  return kTwoPi * s / side;
}

}  // namespace

TorusSpectralField::TorusSpectralField(double side, int modes_per_axis) : side_(side), n_(modes_per_axis) {
  if (!(side > 0.0)) throw std::invalid_argument("torus side must be positive");
  if (modes_per_axis < 2 || modes_per_axis % 2) throw std::invalid_argument("modes per axis must be even and >= 2");
}

TorusSpectralField TorusSpectralField::real_mode(double side, int modes_per_axis, const Mode& k, double a, double b) {
  TorusSpectralField f(side, modes_per_axis);
  // a cos + b sin = Re((a - i b) e^{i theta}).
  if (mode_norm_sq(k) == 0) {
    f.set(k, a);
    return f;
  }
  f.add(k, Complex(a, -b) / 2.0);
  f.add(negate(k), Complex(a, b) / 2.0);
  return f;
}

TorusSpectralField TorusSpectralField::random_real(double side, int modes_per_axis, int count, int max_mode,
                                                   std::mt19937_64& rng) {
  if (max_mode > modes_per_axis / 2) throw std::invalid_argument("random modes exceed the truncation");
  TorusSpectralField f(side, modes_per_axis);
  std::uniform_int_distribution<int> pick(-max_mode, max_mode);
  std::uniform_real_distribution<double> amp(-1.0, 1.0);
  for (int n = 0; n < count; ++n) {
    Mode k{pick(rng), pick(rng), pick(rng), pick(rng)};
    double a = amp(rng), b = amp(rng);
    TorusSpectralField mode = real_mode(side, modes_per_axis, k, a, b);
    for (const auto& [kk, c] : mode.coefficients()) f.add(kk, c);
  }
  return f;
}

Complex TorusSpectralField::coeff(const Mode& k) const {
  auto it = coeffs_.find(k);
  return it == coeffs_.end() ? Complex(0.0) : it->second;
}

void TorusSpectralField::set(const Mode& k, Complex c) {
  for (int v : k)
    if (std::abs(v) > n_ / 2) throw std::out_of_range("mode outside the spectral truncation");
  if (c == Complex(0.0)) coeffs_.erase(k);
  else coeffs_[k] = c;
}

void TorusSpectralField::add(const Mode& k, Complex c) { set(k, coeff(k) + c); }

double TorusSpectralField::conjugate_symmetry_defect() const {
  double worst = 0.0;
  for (const auto& [k, c] : coeffs_) worst = std::max(worst, std::abs(coeff(negate(k)) - std::conj(c)));
  return worst;
}

double TorusSpectralField::wavenumber_sq(const Mode& k) const {
  double f = kTwoPi / side_;
  return f * f * mode_norm_sq(k);
}

double TorusSpectralField::operator()(const Point& x) const {
  double s = 0.0;
  for (const auto& [k, c] : coeffs_) {
    double t = phase(k, x, side_);
    s += c.real() * std::cos(t) - c.imag() * std::sin(t);
  }
  return s;
}

Jet TorusSpectralField::jet(const Point& x, int order) const { return field().jet(x, order); }

ScalarField TorusSpectralField::field() const {
  TorusSpectralField self = *this;
  return ScalarField::analytic([self](const JetPoint& x) {
    const int order = x[0].order();
    Jet s = Jet::constant(0.0, order);
    for (const auto& [k, c] : self.coeffs_) {
      Jet t = Jet::constant(0.0, order);
      for (int i = 0; i < kDim; ++i) t += x[i] * (kTwoPi * k[i] / self.side_);
      s += c.real() * cos(t) - c.imag() * sin(t);
    }
    return s;
  });
}

TorusSpectralField TorusSpectralField::bilaplacian() const {
  return multiplied([this](const Mode& k) { return Complex(std::pow(wavenumber_sq(k), 2)); });
}

TorusSpectralField TorusSpectralField::operator-(const TorusSpectralField& o) const {
  if (o.side_ != side_ || o.n_ != n_) throw std::invalid_argument("torus fields live on different lattices");
  TorusSpectralField out = *this;
  for (const auto& [k, c] : o.coeffs_) out.add(k, -c);
  return out;
}

std::vector<double> TorusSpectralField::grid_samples(int n) const {
  if (n < 1) throw std::invalid_argument("grid needs at least one point per axis");
  std::vector<double> out(static_cast<std::size_t>(n) * n * n * n);
  const double h = side_ / n;
  for (std::size_t idx = 0; idx < out.size(); ++idx) {
    std::size_t r = idx;
    Point x;
    for (int i = kDim - 1; i >= 0; --i) {
      x[i] = h * static_cast<double>(r % n);
      r /= n;
    }
    out[idx] = (*this)(x);
  }
  return out;
}

double TorusSpectralField::parseval_defect(int n) const {
  auto s = grid_samples(n);
  double mean_sq = 0.0;
  for (double v : s) mean_sq += v * v;
  mean_sq /= static_cast<double>(s.size());
  double energy = 0.0;
  for (const auto& [k, c] : coeffs_) energy += std::norm(c);
  return std::abs(mean_sq - energy);
}

TorusGreen::TorusGreen(double side, int modes_per_axis, const Point& source, int power)
    : side_(side), n_(modes_per_axis), source_(source), power_(power) {
  if (!(side > 0.0)) throw std::invalid_argument("torus side must be positive");
  if (modes_per_axis < 2 || modes_per_axis % 2) throw std::invalid_argument("modes per axis must be even");
  if (power < 1) throw std::invalid_argument("Green's function power must be positive");
  const int half = n_ / 2;
  const double f = kTwoPi / side_;
  const double volume = std::pow(side_, 4);
  inv_norm_.assign(static_cast<std::size_t>(kDim * half * half + 1), 0.0);
  for (std::size_t s = 1; s < inv_norm_.size(); ++s) inv_norm_[s] = 1.0 / (volume * std::pow(f * f * double(s), power_));
}

TorusGreen biharmonic_green_torus(int modes_per_axis, double side, const Point& source) {
  if (modes_per_axis < 16) throw std::invalid_argument("the biharmonic Green's function needs N >= 16");
  return TorusGreen(side, modes_per_axis, source, 2);
}

Complex TorusGreen::coeff(const Mode& k) const {
  for (int v : k)
    if (std::abs(v) > n_ / 2) return 0.0;
  return inv_norm_[mode_norm_sq(k)] * std::polar(1.0, -phase(k, source_, side_));
}

namespace {

// sum over the full cube of w(|k|^2) prod_i cos_i[|k_i|], folded onto k_i >= 0.
double folded_sum(const std::vector<double>& inv_norm, const std::array<std::vector<double>, kDim>& cos_tab, int half) {
  std::vector<double> c4(half + 1);
  std::vector<int> sq(half + 1);
  for (int k = 0; k <= half; ++k) {
    double w = k == 0 ? 1.0 : 2.0;
    c4[k] = w * cos_tab[3][k];
    sq[k] = k * k;
  }
  return parallel_sum(static_cast<std::size_t>(half + 1), [&](std::size_t k1) {
    double total = 0.0;
    double w1 = (k1 == 0 ? 1.0 : 2.0) * cos_tab[0][k1];
    for (int k2 = 0; k2 <= half; ++k2) {
      double w2 = w1 * (k2 == 0 ? 1.0 : 2.0) * cos_tab[1][k2];
      for (int k3 = 0; k3 <= half; ++k3) {
        double w3 = w2 * (k3 == 0 ? 1.0 : 2.0) * cos_tab[2][k3];
        const double* row = inv_norm.data() + (int(k1 * k1) + k2 * k2 + k3 * k3);
        double inner = 0.0;
        for (int k4 = 0; k4 <= half; ++k4) inner += c4[k4] * row[sq[k4]];
        total += w3 * inner;
      }
    }
    return total;
  });
}

}  // namespace

double TorusGreen::operator()(const Point& x) const {
  const int half = n_ / 2;
  std::array<std::vector<double>, kDim> cos_tab;
  for (int i = 0; i < kDim; ++i) {
    cos_tab[i].resize(half + 1);
    double d = x[i] - source_[i];
    for (int k = 0; k <= half; ++k) cos_tab[i][k] = std::cos(kTwoPi * k * d / side_);
  }
  return folded_sum(inv_norm_, cos_tab, half);
}

double TorusGreen::between(const Point& xi, const Point& eta) const {
  // Phases of the two points are formed separately and multiplied, so the
  // result is not symmetric by construction.
  const int half = n_ / 2;
  std::array<std::vector<double>, kDim> cos_tab;
  for (int i = 0; i < kDim; ++i) {
    cos_tab[i].resize(half + 1);
    for (int k = 0; k <= half; ++k) {
      Complex a = std::polar(1.0, -kTwoPi * k * xi[i] / side_);
      Complex b = std::polar(1.0, kTwoPi * k * eta[i] / side_);
      cos_tab[i][k] = (a * b).real();
    }
  }
  return folded_sum(inv_norm_, cos_tab, half);
}

double TorusGreen::pair(const TorusSpectralField& f) const {
  if (f.side() != side_) throw std::invalid_argument("field and Green's function live on different tori");
  // int G(source, eta) f(eta) = L^4 sum_k conj(Ghat_k) f_k with Ghat the coefficients of G(source, .).
  const double volume = std::pow(side_, 4);
  Complex s = 0.0;
  for (const auto& [k, c] : f.coefficients()) s += volume * std::conj(coeff(k)) * c;
  return s.real();
}

TorusSpectralField TorusGreen::convolve(const TorusSpectralField& f) const {
  if (f.side() != side_) throw std::invalid_argument("field and Green's function live on different tori");
  const double volume = std::pow(side_, 4);
  return f.multiplied([&](const Mode& k) {
    for (int v : k)
      if (std::abs(v) > n_ / 2) return Complex(0.0);
    return Complex(volume * inv_norm_[mode_norm_sq(k)]);
  });
}

std::string GreenDecomposition::to_json() const {
  nlohmann::json j;
  j["c_log"] = c_log;
  j["window"] = {window[0], window[1]};
  j["rms"] = rms;
  j["expected_c_log"] = expected_c_log;
  j["relative_error"] = relative_error;
  j["beta"] = {{"c0", beta[0]}, {"r2", beta[1]}, {"r4", beta[2]}, {"sum_x4", beta[3]}};
  j["consistent"] = consistent;
  return j.dump();
}

GreenDecomposition fit_log_singularity(const TorusGreen& g, std::array<double, 2> window, double tolerance,
                                       double rms_threshold) {
  const double spacing = g.side() / g.modes_per_axis();
  if (window[0] == 0.0 && window[1] == 0.0) window = {4.0 * spacing, g.side() / 8.0};
  if (window[0] < 2.0 * spacing) throw std::invalid_argument("fit window is not resolved by the spectral grid");
  if (!(window[1] > window[0])) throw std::invalid_argument("fit window is empty");

  // Least squares weighted by a product rule on the window annulus, i.e. an
  // L2 projection; axis-aligned sampling alone picks up the Gibbs ripple of
  // the cubic truncation.
  const SphereRule sphere = SphereRule::product(3, 4);
  const int n_r = 16;
  std::vector<std::array<double, 5>> rows;
  std::vector<double> values, radii, weights;
  for (int a = 0; a < n_r; ++a) {
    double r = window[0] + (window[1] - window[0]) * a / (n_r - 1);
    for (std::size_t k = 0; k < sphere.size(); ++k) {
      Point x;
      double quart = 0.0;
      for (int i = 0; i < kDim; ++i) {
        double v = r * sphere.nodes[k][i];
        x[i] = g.source()[i] + v;
        quart += v * v * v * v;
      }
      rows.push_back({std::log(r), 1.0, r * r, r * r * r * r, quart});
      values.push_back(g(x));
      radii.push_back(r);
      weights.push_back(sphere.weights[k]);
    }
  }
  Eigen::MatrixXd a(rows.size(), 5);
  Eigen::VectorXd b(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    double w = std::sqrt(weights[i]);
    for (int j = 0; j < 5; ++j) a(i, j) = w * rows[i][j];
    b(i) = w * values[i];
  }
  Eigen::VectorXd c = a.colPivHouseholderQr().solve(b);
  GreenDecomposition out;
  out.c_log = c(0);
  out.beta = {c(1), c(2), c(3), c(4)};
  out.window = window;
  double sq = 0.0, wsum = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    double fit = 0.0;
    for (int j = 0; j < 5; ++j) fit += c(j) * rows[i][j];
    sq += weights[i] * (fit - values[i]) * (fit - values[i]);
    wsum += weights[i];
  }
  out.rms = std::sqrt(sq / wsum);
  for (std::size_t i = 0; i < rows.size(); ++i) out.beta_samples.emplace_back(radii[i], values[i] - c(0) * rows[i][0]);
  out.expected_c_log = -1.0 / (8.0 * std::numbers::pi * std::numbers::pi);
  out.relative_error = std::abs(out.c_log / out.expected_c_log - 1.0);
  out.consistent = out.relative_error <= tolerance && out.rms <= rms_threshold;
  return out;
}

double representation_check(const TorusSpectralField& f, int grid) {
  TorusGreen g(f.side(), f.modes_per_axis(), {}, 2);
  TorusSpectralField recovered = g.convolve(f.bilaplacian());
  auto lhs = f.grid_samples(grid);
  auto rhs = recovered.grid_samples(grid);
  const double mean = f.mean();
  double worst = 0.0;
  for (std::size_t i = 0; i < lhs.size(); ++i) worst = std::max(worst, std::abs(lhs[i] - mean - rhs[i]));
  return worst;
}

TorusSpectralField regular_part_field(const TorusSpectralField& b) {
  return b.multiplied([&](const Mode& k) {
    double w = b.wavenumber_sq(k);
    return w == 0.0 ? Complex(0.0) : Complex(2.0 / (w * w));
  });
}

void export_grid(const std::string& path, const TorusSpectralField& f, int n) {
  static_assert(std::endian::native == std::endian::little, "grid export assumes a little-endian host");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  const char magic[8] = {'Q', 'L', 'A', 'B', 'F', 'L', 'D', '1'};
  std::int32_t count = n, layout = 0;
  double side = f.side();
  out.write(magic, 8);
  out.write(reinterpret_cast<const char*>(&count), sizeof count);
  out.write(reinterpret_cast<const char*>(&side), sizeof side);
  out.write(reinterpret_cast<const char*>(&layout), sizeof layout);
  auto s = f.grid_samples(n);
  out.write(reinterpret_cast<const char*>(s.data()), static_cast<std::streamsize>(s.size() * sizeof(double)));
  if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

std::vector<double> import_grid(const std::string& path, int* n, double* side) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  char magic[8];
  std::int32_t count = 0, layout = 0;
  double l = 0.0;
  in.read(magic, 8);
  in.read(reinterpret_cast<char*>(&count), sizeof count);
  in.read(reinterpret_cast<char*>(&l), sizeof l);
  in.read(reinterpret_cast<char*>(&layout), sizeof layout);
  if (!in || std::memcmp(magic, "QLABFLD1", 8) != 0 || layout != 0 || count < 1)
    throw std::runtime_error("'" + path + "' is not a grid export");
  std::vector<double> s(static_cast<std::size_t>(count) * count * count * count);
  in.read(reinterpret_cast<char*>(s.data()), static_cast<std::streamsize>(s.size() * sizeof(double)));
  if (!in) throw std::runtime_error("'" + path + "' is truncated");
  if (n) *n = count;
  if (side) *side = l;
  return s;
}

}  // namespace qlab
