#pragma once

// Fourier fields and Green's functions on the flat torus (R/LZ)^4.
// A field is f(x) = sum_k c_k exp(2 pi i k.x / L) over integer modes with
// |k_i| <= N/2.

#include <complex>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "qlab/fields.hpp"

namespace qlab {

using Mode = std::array<int, kDim>;
using Complex = std::complex<double>;

class TorusSpectralField {
public:
  TorusSpectralField(double side, int modes_per_axis);

  // A single real mode a cos(2 pi k.x/L) + b sin(2 pi k.x/L), stored as the pair k, -k.
  static TorusSpectralField real_mode(double side, int modes_per_axis, const Mode& k, double a, double b = 0.0);
  // Real field with `count` random modes (|k_i| <= max_mode) and O(1) amplitudes.
  static TorusSpectralField random_real(double side, int modes_per_axis, int count, int max_mode, std::mt19937_64& rng);

  double side() const { return side_; }
  int modes_per_axis() const { return n_; }
  const std::map<Mode, Complex>& coefficients() const { return coeffs_; }
  Complex coeff(const Mode& k) const;
  // Throws std::out_of_range for modes outside the truncation.
  void set(const Mode& k, Complex c);
  void add(const Mode& k, Complex c);

  double mean() const { return coeff({0, 0, 0, 0}).real(); }
  bool zero_mean(double tol = 0.0) const { return std::abs(coeff({0, 0, 0, 0})) <= tol; }
  // max |c_{-k} - conj(c_k)|
  double conjugate_symmetry_defect() const;

  double wavenumber_sq(const Mode& k) const;  // |2 pi k / L|^2

  double operator()(const Point& x) const;
  Jet jet(const Point& x, int order) const;
  ScalarField field() const;

  // Mode-wise multiplication by m(k).
  template <class M>
  TorusSpectralField multiplied(M m) const {
    TorusSpectralField out(side_, n_);
    for (const auto& [k, c] : coeffs_) out.add(k, c * m(k));
    return out;
  }
  TorusSpectralField bilaplacian() const;
  TorusSpectralField operator-(const TorusSpectralField& o) const;

  // Samples on the uniform grid with n points per axis, row-major with the
  // first axis slowest.
  std::vector<double> grid_samples(int n) const;
  // | mean of f^2 over the grid - sum |c_k|^2 |; zero up to rounding once the
  // grid resolves every mode (n > 2 * largest |k_i|).
  double parseval_defect(int n) const;

private:
  double side_;
  int n_;
  std::map<Mode, Complex> coeffs_;
};

// G(source, x) for (-Delta)^power with the zero mode removed:
// G = L^{-4} sum_{k != 0} exp(2 pi i k.(x - source)/L) / |2 pi k/L|^{2 power}.
// power = 2 is the biharmonic Green's function (Delta^2 G = delta - 1/L^4, zero mean).
class TorusGreen {
public:
  TorusGreen(double side, int modes_per_axis, const Point& source, int power = 2);

  double side() const { return side_; }
  int modes_per_axis() const { return n_; }
  const Point& source() const { return source_; }
  int power() const { return power_; }

  // Fourier coefficient of x -> G(source, x).
  Complex coeff(const Mode& k) const;

  // Direct summation over the truncated lattice.
  double operator()(const Point& x) const;
  double between(const Point& xi, const Point& eta) const;

  // integral of G(source, eta) f(eta) d eta, in spectral arithmetic.
  double pair(const TorusSpectralField& f) const;
  // x -> integral of G(x, eta) f(eta) d eta as a spectral field.
  TorusSpectralField convolve(const TorusSpectralField& f) const;

private:
  double side_;
  int n_;
  Point source_;
  int power_;
  std::vector<double> inv_norm_;  // indexed by |k|^2
};

TorusGreen biharmonic_green_torus(int modes_per_axis, double side, const Point& source);

struct GreenDecomposition {
  double c_log = 0.0;
  std::array<double, 2> window{};
  double rms = 0.0;
  // Regular part beta = c0 + c2 r^2 + c4 r^4 + c4x sum x_i^4.
  std::array<double, 4> beta{};
  std::vector<std::pair<double, double>> beta_samples;  // (r, G - c_log log r)
  double expected_c_log = 0.0;
  double relative_error = 0.0;
  // c_log within the tolerance of the expected value and rms below the threshold.
  bool consistent = false;

  std::string to_json() const;
};

// Weighted least-squares fit of G(source + v) against
// {log r, 1, r^2, r^4, sum v_i^4} over the annulus r in the window. A zero
// window selects [4 L/N, L/8]. Throws std::invalid_argument when the lower
// end is below two grid spacings.
GreenDecomposition fit_log_singularity(const TorusGreen& g, std::array<double, 2> window = {0.0, 0.0},
                                       double tolerance = 0.02, double rms_threshold = 1e-5);

// max over the n^4 grid of |f - mean(f) - int G Delta^2 f|.
double representation_check(const TorusSpectralField& f, int grid = 8);

// phi = 2 int G(., eta) b(eta) d eta.
TorusSpectralField regular_part_field(const TorusSpectralField& b);

// Binary export: 8-byte magic "QLABFLD1", int32 samples per axis, float64
// side length, int32 layout (0 = row-major, first axis slowest), then the
// samples as float64, all little-endian.
void export_grid(const std::string& path, const TorusSpectralField& f, int n);
std::vector<double> import_grid(const std::string& path, int* n = nullptr, double* side = nullptr);

}  // namespace qlab
