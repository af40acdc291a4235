#pragma once

// Scalar fields and metrics on a coordinate box in R^4, with derivative access
// up to fourth order. Analytic fields are written once against Jet inputs;
// sampled fields are plain callbacks differentiated by centered stencils of
// accuracy order 4.

#include <Eigen/Dense>
#include <array>
#include <functional>
#include <limits>
#include <string>

#include "qlab/jet.hpp"

namespace qlab {

struct Box {
  Point lo{}, hi{};

  static Box unbounded();
  static Box cube(double half_width, const Point& center = {});
  bool contains(const Point& x, double margin = 0.0) const;
  double min_width() const;
};

enum class DerivativeMode { analytic, finite_difference };

std::string to_string(DerivativeMode m);

// Centered finite-difference weights (Fornberg) for the given derivative order
// on integer offsets -m..m.
std::vector<double> fd_weights(int derivative_order, int half_width);

// Half-width of the order-4 accurate centered stencil for a derivative order.
int fd_half_width(int derivative_order);

using MetricJet = std::array<std::array<Jet, kDim>, kDim>;

class ScalarField {
public:
  using JetFn = std::function<Jet(const JetPoint&)>;
  using ValueFn = std::function<double(const Point&)>;

  static ScalarField analytic(JetFn f, Box box = Box::unbounded());
  // step <= 0 selects the default h = min box width * 1e-2.
  static ScalarField sampled(ValueFn f, Box box, double step = 0.0);
  static ScalarField constant(double c);

  double operator()(const Point& x) const;
  Jet jet(const Point& x, int order) const;
  Eigen::Vector4d gradient(const Point& x) const;

  DerivativeMode mode() const { return mode_; }
  double step() const { return step_; }
  const Box& box() const { return box_; }
  const JetFn& jet_fn() const { return jet_fn_; }

private:
  DerivativeMode mode_ = DerivativeMode::analytic;
  JetFn jet_fn_;
  ValueFn value_fn_;
  Box box_;
  double step_ = 0.0;
};

class MetricField {
public:
  using JetFn = std::function<MetricJet(const JetPoint&)>;
  using ValueFn = std::function<Eigen::Matrix4d(const Point&)>;

  static MetricField analytic(JetFn f, Box box = Box::unbounded());
  static MetricField sampled(ValueFn f, Box box, double step = 0.0);
  static MetricField flat(Box box = Box::unbounded());
  // e^{2w} delta for an analytic w.
  static MetricField conformally_flat(const ScalarField& w);

  Eigen::Matrix4d operator()(const Point& x) const;
  // Throws if x is outside the box (with the stencil margin for sampled
  // metrics) or the metric is numerically degenerate at x.
  MetricJet jet(const Point& x, int order) const;

  DerivativeMode mode() const { return mode_; }
  double step() const { return step_; }
  const Box& box() const { return box_; }
  const JetFn& jet_fn() const { return jet_fn_; }

private:
  DerivativeMode mode_ = DerivativeMode::analytic;
  JetFn jet_fn_;
  ValueFn value_fn_;
  Box box_;
  double step_ = 0.0;
};

inline constexpr double kEigenvalueFloor = 1e-8;

// Throws std::domain_error when the smallest eigenvalue is below the floor.
void require_positive_definite(const Eigen::Matrix4d& g);

// Jets of a vector-valued sampled function by tensor-product stencils.
std::vector<Jet> finite_difference_jets(const std::function<void(const Point&, double*)>& f, int components,
                                        const Point& x, double step, int order);

}  // namespace qlab
