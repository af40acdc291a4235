#pragma once

// Geodesic distances on chart metrics by discrete energy minimization, and
// comparisons of the resulting distance with the Euclidean one.

#include <string>
#include <utility>
#include <vector>

#include "qlab/cnc.hpp"
#include "qlab/fields.hpp"

namespace qlab {

struct GeodesicOptions {
  int segments = 64;
  double gradient_tolerance = 1e-10;  // sup norm of the energy gradient, relative to max(1, |y - z|)
  int max_iterations = 200;
  // Report (4 L(2n) - L(n)) / 3 from a second solve with twice the segments,
  // removing the O(n^-2) midpoint-rule error.
  bool extrapolate = true;
};

struct PathPolyline {
  std::vector<Point> nodes;  // endpoints included
  double energy = 0.0;       // segments * sum of g(mid)(dx, dx)
  double length = 0.0;       // sum of sqrt(g(mid)(dx, dx))
  int iterations = 0;
};

// Minimizes the midpoint-rule energy over the interior nodes with damped
// Gauss-Newton steps (block-tridiagonal model Hessian) and a backtracking line
// search that never accepts an energy increase. Throws std::runtime_error on
// non-convergence and std::out_of_range when a node leaves the metric's box.
PathPolyline geodesic_path(const MetricField& g, const Point& y, const Point& z, const GeodesicOptions& opt = {});

struct MeasuredDistance {
  double value = 0.0;
  double error_estimate = 0.0;  // distance to the finer of the two polyline lengths
};

// Lengths from opt.segments and twice as many, combined as described above.
MeasuredDistance measure_distance(const MetricField& g, const Point& y, const Point& z, const GeodesicOptions& opt = {});

// Length of the optimal polyline, extrapolated unless opt.extrapolate is false.
double geodesic_distance(const MetricField& g, const Point& y, const Point& z, const GeodesicOptions& opt = {});

// g = delta + (eps^2 / 3) R_{aijb}(0) y^i y^j.
MetricField quadratic_blow_up_metric(const CurvatureJet& jet, double eps);

// Largest radius on which the metric above keeps every eigenvalue >= 1/2.
double working_radius(const CurvatureJet& jet, double eps);

struct DistanceSample {
  double eps = 0.0;
  Point y{}, z{};
  double euclid = 0.0;
  double geodesic = 0.0;
  double ratio_gap = 0.0;  // |d / |y - z| - 1|
  double fitted_c = 0.0;   // ratio_gap / (eps^2 (|y|^2 + |z|^2))
  double error_estimate = 0.0;  // on the geodesic distance
};

struct DistanceSweep {
  std::vector<DistanceSample> samples;
  std::vector<double> eps;
  std::vector<double> c_by_eps;  // largest fitted c at each eps
  double c_spread = 0.0;         // max / min of c_by_eps
  double eps_exponent = 0.0;     // least-squares slope of log(mean gap) against log eps
  std::vector<std::pair<Point, Point>> skipped;  // pairs outside the working ball

  // eps,|y|,|z|,euclid,geodesic,ratio_gap,fitted_c,error_estimate
  std::string csv() const;
};

DistanceSweep distance_ratio_sweep(const CurvatureJet& jet, const std::vector<double>& eps,
                                   const std::vector<std::pair<Point, Point>>& pairs, const GeodesicOptions& opt = {});

struct DerivativeGap {
  double value = 0.0;        // with step h = 1e-3 |y|
  double coarse_value = 0.0;  // with step 2h
  double step = 0.0;
  // The two steps disagree by more than 10% of the larger value and by more
  // than the solver floor; the value is then not trustworthy.
  bool noisy = false;
};

// j-th directional derivative along `direction` (unit) in y of
// log|y - z| - log d(y, z), by central differences over full re-solves.
// Requires |z| < |y| / 2 and j in {1, 2, 3}.
DerivativeGap log_distance_derivative_gap(const CurvatureJet& jet, double eps, const Point& y, const Point& z, int j,
                                          const Point& direction, const GeodesicOptions& opt = {});

}  // namespace qlab
