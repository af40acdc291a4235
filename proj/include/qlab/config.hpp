#pragma once

// Run configuration for the command-line harness. The file format is INI:
//
//   [general]
//   seed = 12345
//   [alpha-sweep]
//   eps_list = 1e-2, 1e-3, 1e-4
//
// Every key must be known; unknown sections or keys raise ConfigError.

#include <array>
#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "qlab/harness.hpp"

namespace qlab {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct BubbleCheckConfig {
  int samples = 10000;
  double max_radius = 50.0;
  double height_min = 0.5;
  double height_max = 2.0;
  double tolerance = 1e-10;
};

struct KernelCheckConfig {
  int samples = 10000;
  double max_radius = 50.0;
  double tolerance = 1e-8;
};

struct MassConfig {
  double height = 1.0;
  double radius = 10.0;
  double band = 1e-3;  // relative
};

struct PohozaevConfig {
  double radius = 20.0;
  double tolerance = 1e-4;  // on residual / |I0|
  std::vector<double> curved_eps{2.5e-3, 1.25e-3, 6.25e-4};
  double curved_radius = 2.0;
  double slope_band = 0.3;
  int radial_cases = 100;
  double radial_tolerance = 1e-6;
};

struct GreenConfig {
  int modes = 64;
  double side = 6.283185307179586;
  double tolerance = 0.02;
  double symmetry_tolerance = 1e-10;
};

struct RepresentConfig {
  int modes = 16;
  int fields = 10;
  double tolerance = 1e-9;
};

struct CncConfig {
  int jets = 50;
};

struct DistanceConfig {
  std::vector<double> eps{0.1, 0.05, 0.025};
  double c_band = 0.25;         // max/min of the fitted constant minus one
  double exponent_band = 0.3;   // around 2
};

struct LongRangeConfig {
  double eps = 1e-4;
  double height = 1.0;
  double delta1 = 1.0;
  double slope_band = 0.01;
  double ring_band = 0.05;
};

struct VrateConfig {
  double side = 1.0;
  int modes = 8;
  std::array<int, 4> mode{1, 0, 0, 0};
  double h0 = 2.0;
  double h_amplitude = 0.1;
  int green_modes = 16;
  double tolerance = 1e-8;
  std::vector<double> eps{1e-2, 1e-3, 1e-4};
};

struct Config {
  std::uint64_t seed = 20240601;
  BubbleCheckConfig bubble;
  KernelCheckConfig kernel;
  MassConfig mass;
  PohozaevConfig pohozaev;
  GreenConfig green;
  RepresentConfig represent;
  CncConfig cnc;
  DistanceConfig distance;
  LongRangeConfig longrange;
  BubblingSequenceConfig sequence;  // shared by alpha-sweep and mainest
  double alpha_band = 0.005;        // relative, for eps <= alpha_eps_max
  double alpha_eps_max = 1e-3;
  double mainest_ratio = 3.0;
  VrateConfig vrate;

  // Throws ConfigError on any invariant violation.
  void validate() const;
};

Config parse_config(std::istream& in);
Config load_config(const std::string& path);

// Section and key names accepted by the parser, "section.key".
std::vector<std::string> config_keys();

}  // namespace qlab
