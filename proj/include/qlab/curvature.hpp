#pragma once

// Curvature tensors, Q-curvature and the Paneitz operator on a 4-D chart.
//
// Conventions: tensors carry lowered indices; R_{abcd} is normalised so that a
// space of constant sectional curvature K has R_{abcd} = K (g_ac g_bd - g_ad g_bc),
// Ric_{bd} = g^{ac} R_{abcd}, and the round sphere has positive scalar curvature.

#include <Eigen/Dense>
#include <array>
#include <string>
#include <vector>

#include "qlab/fields.hpp"
#include "qlab/quadrature.hpp"

namespace qlab {

using Tensor4 = std::array<double, 256>;
using Tensor5 = std::array<double, 1024>;

constexpr int idx4(int a, int b, int c, int d) { return ((a * 4 + b) * 4 + c) * 4 + d; }
constexpr int idx5(int a, int b, int c, int d, int e) { return idx4(a, b, c, d) * 4 + e; }

struct RiemannAtPoint {
  Tensor4 R{};
  Eigen::Matrix4d g = Eigen::Matrix4d::Identity();
  Eigen::Matrix4d g_inv = Eigen::Matrix4d::Identity();

  double operator()(int a, int b, int c, int d) const { return R[idx4(a, b, c, d)]; }
  Eigen::Matrix4d ricci() const;
  double scalar() const;
  double ricci_norm_sq() const;

  // Largest violation among antisymmetry, pair symmetry and first Bianchi.
  double symmetry_defect() const;
};

// Metric, inverse and Christoffel symbols as jets at a point.
struct GeometryJet {
  MetricJet g;
  MetricJet g_inv;
  std::array<std::array<std::array<Jet, kDim>, kDim>, kDim> gamma;  // gamma[k][i][j] = Gamma^k_ij
  std::array<std::array<std::array<Jet, kDim>, kDim>, kDim> gamma_low;  // Gamma_{k,ij}
  int order = 0;
};

GeometryJet geometry_jet(const MetricField& g, const Point& x, int order);

// Inverse of a metric jet by a Neumann series about its value.
MetricJet inverse_metric_jet(const MetricJet& g);

// Riemann components as jets of order (geometry order - 2).
std::array<Jet, 256> riemann_jets(const GeometryJet& geo);
MetricJet ricci_jets(const GeometryJet& geo, const std::array<Jet, 256>& riem);
Jet scalar_jet(const GeometryJet& geo, const MetricJet& ric);

// Laplace-Beltrami g^{ij}(d_ij f - Gamma^k_ij d_k f); order drops by two.
Jet laplacian(const GeometryJet& geo, const Jet& f);

RiemannAtPoint riemann_of_metric(const MetricField& g, const Point& x);

// R_{abcd} and its covariant derivative nabla_e R_{abcd} at x.
struct RiemannJetAtPoint {
  RiemannAtPoint riemann;
  Tensor5 nabla{};
};
RiemannJetAtPoint riemann_with_derivative(const MetricField& g, const Point& x);

// Throws std::invalid_argument when the input violates the Riemann symmetries
// by more than `tolerance`.
Tensor4 weyl_tensor(const RiemannAtPoint& riem, const Eigen::Matrix4d& g_at_x, double tolerance = 1e-10);
double full_norm_sq(const Tensor4& t, const Eigen::Matrix4d& g_inv);
// Largest single contraction g^{ac} W_{abcd} and its index-pair variants.
double max_trace(const Tensor4& t, const Eigen::Matrix4d& g_inv);

double q_curvature(const MetricField& g, const Point& x);
// Delta^2 u - div((2/3 R g - 2 Ric) grad u) with Delta = div grad; on the round
// sphere this is Delta^2 - 2 Delta.
double paneitz_apply(const MetricField& g, const ScalarField& u, const Point& x);

MetricField conformal_transform(const MetricField& g, const ScalarField& u);

struct DeviationReport {
  double max_deviation = 0.0;
  std::size_t samples = 0;
  std::string derivative_mode;
  double step = 0.0;  // zero for analytic derivatives
};

// max |P_{e^{2u}g} f - e^{-4u} P_g f| over the samples.
DeviationReport check_conformal_covariance(const MetricField& g, const ScalarField& u, const ScalarField& f,
                                           const std::vector<Point>& samples);
// max |P_g u + 2 Q_g - 2 Q_{e^{2u}g} e^{4u}| over the samples.
DeviationReport check_q_transformation(const MetricField& g, const ScalarField& u, const std::vector<Point>& samples);

// A chart together with a global quadrature rule in chart coordinates; the
// volume form sqrt(det g) is applied by the consumer.
struct ChartPatch {
  MetricField metric;
  std::vector<Point> nodes;
  std::vector<double> weights;
};

struct ChartQuadratureModel {
  std::vector<ChartPatch> patches;
  double expected_volume = 0.0;
  std::string name;
};

// Round S^4 of radius 1 covered by the two stereographic unit balls, optionally
// with a conformal perturbation e^{2w} of the round metric (w given in the
// north chart and pulled back to the south chart by inversion).
ChartQuadratureModel sphere_chart_model(int n_polar, int n_t, int n_phi, const ScalarField* perturbation = nullptr);
ChartQuadratureModel flat_torus_model(double side, int n_per_axis);

struct GaussBonnetReport {
  double total = 0.0;        // integral of Q + |W|^2/8
  double volume = 0.0;       // quadrature volume
  double q_integral = 0.0;
  double weyl_integral = 0.0;
};

// Throws std::runtime_error when the quadrature volume misses the model's
// expected volume by more than 1%.
GaussBonnetReport gauss_bonnet_check(const ChartQuadratureModel& model);

}  // namespace qlab
