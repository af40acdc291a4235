#include "qlab/geodesic.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "qlab/parallel.hpp"

namespace qlab {

namespace {

using Vec4 = Eigen::Vector4d;
using Mat4 = Eigen::Matrix4d;

struct SegmentMetric {
  Mat4 g;
  std::array<Mat4, kDim> dg;  // dg[k] = d_k g at the midpoint
};

SegmentMetric segment_metric(const MetricField& metric, const Point& m) {
  const MetricJet j = metric.jet(m, 1);
  SegmentMetric s;
  for (int a = 0; a < kDim; ++a)
    for (int b = 0; b < kDim; ++b) {
      s.g(a, b) = j[a][b].value();
      for (int k = 0; k < kDim; ++k) {
        MultiIndex e{};
        e[k] = 1;
        s.dg[k](a, b) = j[a][b].partial(e);
      }
    }
  return s;
}

Vec4 vec(const Point& p) { return Vec4(p[0], p[1], p[2], p[3]); }
Point point(const Vec4& v) { return {v[0], v[1], v[2], v[3]}; }

struct PathState {
  std::vector<Vec4> x;
  std::vector<SegmentMetric> seg;
  double energy = 0.0;
  double length = 0.0;
};

void evaluate(const MetricField& metric, PathState& s) {
  const std::size_t n = s.x.size() - 1;
  s.seg.resize(n);
  s.energy = 0.0;
  s.length = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    s.seg[i] = segment_metric(metric, point(0.5 * (s.x[i] + s.x[i + 1])));
    const Vec4 d = s.x[i + 1] - s.x[i];
    const double q = d.dot(s.seg[i].g * d);
    if (!(q >= 0.0)) throw std::domain_error("metric is not positive along the path");
    s.energy += q;
    s.length += std::sqrt(q);
  }
  s.energy *= static_cast<double>(n);
}

// Energy gradient with respect to the interior nodes.
std::vector<Vec4> gradient(const PathState& s) {
  const std::size_t n = s.x.size() - 1;
  std::vector<Vec4> grad(n - 1, Vec4::Zero());
  for (std::size_t seg = 0; seg < n; ++seg) {
    const Vec4 d = s.x[seg + 1] - s.x[seg];
    const Vec4 gd = s.seg[seg].g * d;
    Vec4 half;
    for (int k = 0; k < kDim; ++k) half[k] = 0.5 * d.dot(s.seg[seg].dg[k] * d);
    // Node seg is the left end, node seg+1 the right end of the segment.
    if (seg >= 1) grad[seg - 1] += static_cast<double>(n) * (-2.0 * gd + half);
    if (seg + 1 <= n - 1) grad[seg] += static_cast<double>(n) * (2.0 * gd + half);
  }
  return grad;
}

// Solves the block-tridiagonal system with diagonal 2n (G_{i-1} + G_i) and
// off-diagonal -2n G_i by block elimination.
std::vector<Vec4> model_step(const PathState& s, const std::vector<Vec4>& grad) {
  const std::size_t m = grad.size();
  const double scale = 2.0 * static_cast<double>(s.x.size() - 1);
  std::vector<Mat4> c_prime(m);
  std::vector<Vec4> d_prime(m);
  for (std::size_t i = 0; i < m; ++i) {
    Mat4 diag = scale * (s.seg[i].g + s.seg[i + 1].g);
    Vec4 rhs = -grad[i];
    if (i > 0) {
      const Mat4 lower = -scale * s.seg[i].g;
      diag -= lower * c_prime[i - 1];
      rhs -= lower * d_prime[i - 1];
    }
    const Eigen::LDLT<Mat4> ldlt(diag);
    c_prime[i] = ldlt.solve(Mat4(-scale * s.seg[i + 1].g));
    d_prime[i] = ldlt.solve(rhs);
  }
  std::vector<Vec4> p(m);
  for (std::size_t i = m; i-- > 0;) p[i] = d_prime[i] - (i + 1 < m ? Vec4(c_prime[i] * p[i + 1]) : Vec4::Zero());
  return p;
}

double max_norm(const std::vector<Vec4>& v) {
  double m = 0.0;
  for (const Vec4& x : v) m = std::max(m, x.cwiseAbs().maxCoeff());
  return m;
}

double norm(const Point& p) { return std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2] + p[3] * p[3]); }

double distance_between(const Point& a, const Point& b) {
  Point d;
  for (int i = 0; i < kDim; ++i) d[i] = a[i] - b[i];
  return norm(d);
}

}  // namespace

PathPolyline geodesic_path(const MetricField& g, const Point& y, const Point& z, const GeodesicOptions& opt) {
  if (opt.segments < 2) throw std::invalid_argument("geodesic path needs at least two segments");
  const std::size_t n = static_cast<std::size_t>(opt.segments);
  PathState s;
  const Vec4 a = vec(y), b = vec(z);
  for (std::size_t i = 0; i <= n; ++i) s.x.push_back(a + (b - a) * (static_cast<double>(i) / n));
  evaluate(g, s);

  const double span = std::max(1.0, (b - a).norm());
  int it = 0;
  for (;; ++it) {
    const std::vector<Vec4> grad = gradient(s);
    if (max_norm(grad) <= opt.gradient_tolerance * span) break;
    if (it >= opt.max_iterations) throw std::runtime_error("geodesic solver did not converge");
    const std::vector<Vec4> p = model_step(s, grad);
    double t = 1.0;
    bool moved = false;
    for (int k = 0; k < 40; ++k, t *= 0.5) {
      PathState trial;
      trial.x = s.x;
      for (std::size_t i = 0; i + 1 < n; ++i) trial.x[i + 1] += t * p[i];
      evaluate(g, trial);
      if (trial.energy < s.energy) {
        moved = true;
        s = std::move(trial);
        break;
      }
    }
    if (!moved) {
      // The predicted decrease is below the rounding level of the energy: stationary.
      double predicted = 0.0;
      for (std::size_t i = 0; i < p.size(); ++i) predicted -= grad[i].dot(p[i]);
      if (predicted <= 1e-13 * s.energy) break;
      throw std::runtime_error("geodesic line search failed");
    }
  }

  PathPolyline out;
  for (const Vec4& v : s.x) out.nodes.push_back(point(v));
  out.energy = s.energy;
  out.length = s.length;
  out.iterations = it;
  return out;
}

MeasuredDistance measure_distance(const MetricField& g, const Point& y, const Point& z, const GeodesicOptions& opt) {
  GeodesicOptions fine = opt;
  fine.segments *= 2;
  const double coarse = geodesic_path(g, y, z, opt).length;
  const double refined = geodesic_path(g, y, z, fine).length;
  if (!opt.extrapolate) return {coarse, std::abs(refined - coarse)};
  const double value = (4.0 * refined - coarse) / 3.0;
  return {value, std::abs(value - refined)};
}

double geodesic_distance(const MetricField& g, const Point& y, const Point& z, const GeodesicOptions& opt) {
  if (!opt.extrapolate) return geodesic_path(g, y, z, opt).length;
  return measure_distance(g, y, z, opt).value;
}

MetricField quadratic_blow_up_metric(const CurvatureJet& jet, double eps) {
  std::array<double, 256> r0{};
  for (int a = 0; a < kDim; ++a)
    for (int i = 0; i < kDim; ++i)
      for (int j = 0; j < kDim; ++j)
        for (int b = 0; b < kDim; ++b) r0[idx4(a, i, j, b)] = to_double(jet.r0(a, i, j, b));
  const double c = eps * eps / 3.0;
  return MetricField::analytic([r0, c](const JetPoint& y) {
    MetricJet g;
    const int order = y[0].order();
    for (int a = 0; a < kDim; ++a)
      for (int b = a; b < kDim; ++b) {
        Jet acc = Jet::constant(a == b ? 1.0 : 0.0, order);
        for (int i = 0; i < kDim; ++i)
          for (int j = 0; j < kDim; ++j) {
            const double w = r0[idx4(a, i, j, b)];
            if (w != 0.0) acc += (c * w) * (y[i] * y[j]);
          }
        g[a][b] = acc;
        g[b][a] = acc;
      }
    return g;
  });
}

double working_radius(const CurvatureJet& jet, double eps) {
  // |R_{aijb} y^i y^j v^a v^b| <= (sum |R|) |y|^2 |v|^2.
  double bound = 0.0;
  for (int a = 0; a < kDim; ++a)
    for (int i = 0; i < kDim; ++i)
      for (int j = 0; j < kDim; ++j)
        for (int b = 0; b < kDim; ++b) bound += std::abs(to_double(jet.r0(a, i, j, b)));
  if (bound == 0.0 || eps == 0.0) return std::numeric_limits<double>::infinity();
  return std::sqrt(1.5 / (eps * eps * bound));
}

std::string DistanceSweep::csv() const {
  std::ostringstream os;
  os.precision(17);
  os << "eps,|y|,|z|,euclid,geodesic,ratio_gap,fitted_c,error_estimate\n";
  for (const DistanceSample& s : samples)
    os << s.eps << ',' << norm(s.y) << ',' << norm(s.z) << ',' << s.euclid << ',' << s.geodesic << ',' << s.ratio_gap
       << ',' << s.fitted_c << ',' << s.error_estimate << '\n';
  return os.str();
}

DistanceSweep distance_ratio_sweep(const CurvatureJet& jet, const std::vector<double>& eps,
                                   const std::vector<std::pair<Point, Point>>& pairs, const GeodesicOptions& opt) {
  DistanceSweep out;
  out.eps = eps;
  struct Task {
    double eps;
    std::pair<Point, Point> pair;
  };
  std::vector<Task> tasks;
  for (double e : eps) {
    const double radius = working_radius(jet, e);
    for (const auto& pr : pairs) {
      if (std::max(norm(pr.first), norm(pr.second)) > radius) {
        out.skipped.push_back(pr);
        continue;
      }
      tasks.push_back({e, pr});
    }
  }
  out.samples.resize(tasks.size());
  parallel_for(tasks.size(), [&](std::size_t k) {
    const Task& t = tasks[k];
    DistanceSample s;
    s.eps = t.eps;
    s.y = t.pair.first;
    s.z = t.pair.second;
    s.euclid = distance_between(s.y, s.z);
    const MeasuredDistance d = measure_distance(quadratic_blow_up_metric(jet, t.eps), s.y, s.z, opt);
    s.geodesic = d.value;
    s.error_estimate = d.error_estimate;
    s.ratio_gap = std::abs(s.geodesic / s.euclid - 1.0);
    const double denom = t.eps * t.eps * (norm(s.y) * norm(s.y) + norm(s.z) * norm(s.z));
    s.fitted_c = denom > 0.0 ? s.ratio_gap / denom : 0.0;
    out.samples[k] = s;
  });

  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int count = 0;
  double c_min = std::numeric_limits<double>::infinity(), c_max = 0.0;
  for (double e : eps) {
    double c = 0.0, gap = 0.0;
    int n = 0;
    for (const DistanceSample& s : out.samples)
      if (s.eps == e) {
        c = std::max(c, s.fitted_c);
        gap += s.ratio_gap;
        ++n;
      }
    out.c_by_eps.push_back(c);
    if (e > 0.0 && n > 0 && gap > 0.0) {
      c_min = std::min(c_min, c);
      c_max = std::max(c_max, c);
      const double lx = std::log(e), ly = std::log(gap / n);
      sx += lx;
      sy += ly;
      sxx += lx * lx;
      sxy += lx * ly;
      ++count;
    }
  }
  if (count >= 2) out.eps_exponent = (count * sxy - sx * sy) / (count * sxx - sx * sx);
  out.c_spread = count >= 1 && c_min > 0.0 ? c_max / c_min : 0.0;
  return out;
}

DerivativeGap log_distance_derivative_gap(const CurvatureJet& jet, double eps, const Point& y, const Point& z, int j,
                                          const Point& direction, const GeodesicOptions& opt) {
  if (j < 1 || j > 3) throw std::invalid_argument("derivative order must be 1, 2 or 3");
  if (!(norm(z) < 0.5 * norm(y))) throw std::invalid_argument("log distance gap needs |z| < |y| / 2");
  const double dn = norm(direction);
  if (!(dn > 0.0)) throw std::invalid_argument("direction must be nonzero");
  const MetricField g = quadratic_blow_up_metric(jet, eps);
  auto f = [&](double t) {
    Point p;
    for (int i = 0; i < kDim; ++i) p[i] = y[i] + t * direction[i] / dn;
    return std::log(distance_between(p, z)) - std::log(geodesic_distance(g, p, z, opt));
  };
  const int half = fd_half_width(j);
  const std::vector<double> w = fd_weights(j, half);
  auto derivative = [&](double h) {
    double acc = 0.0;
    for (int k = -half; k <= half; ++k)
      if (w[k + half] != 0.0) acc += w[k + half] * f(k * h);
    return acc / std::pow(h, j);
  };
  DerivativeGap out;
  out.step = 1e-3 * norm(y);
  out.value = derivative(out.step);
  out.coarse_value = derivative(2.0 * out.step);
  const double floor = 1e-13 / std::pow(out.step, j);
  const double diff = std::abs(out.value - out.coarse_value);
  out.noisy = diff > 0.1 * std::max(std::abs(out.value), std::abs(out.coarse_value)) && diff > floor;
  return out;
}

}  // namespace qlab
