// Acceptance run: one PASS/FAIL line per criterion, built from the suite
// checks at the default configuration. Criteria listed in kKnownFailing are
// reported as failures but do not change the exit status.

#include <fmt/format.h>

#include <algorithm>
#include <iostream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "qlab/config.hpp"
#include "qlab/report.hpp"
#include "qlab/suites.hpp"

namespace {

struct Criterion {
  int id;
  std::string title;
  std::vector<std::pair<std::string, std::string>> checks;  // (command, check name)
};

// The closed-form bubble mass on B(10) sits 1.2% below the full mass, and the
// exact-bubble mass on B(l) converges like L^-4 from 4.4% at eps = 1e-3.
const std::set<int> kKnownFailing{3};

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> list{
      {1, "bubble identity", {{"bubble-check", "max_residual"}}},
      {2,
       "linearized kernel",
       {{"kernel-check", "max_residual_psi0"},
        {"kernel-check", "max_residual_psi1"},
        {"kernel-check", "max_residual_psi2"},
        {"kernel-check", "max_residual_psi3"},
        {"kernel-check", "max_residual_psi4"}}},
      {3,
       "energy quantization",
       {{"mass", "relative_deficit"},
        {"alpha-sweep", "relative_deviation_eps_0.001"},
        {"alpha-sweep", "relative_deviation_eps_0.0001"},
        {"alpha-sweep", "relative_deviation_eps_1e-05"}}},
      {4,
       "torus Green's function",
       {{"green-fit", "c_log_relative_error"}, {"green-fit", "symmetry"}, {"represent", "representation_defect"}}},
      {5,
       "Pohozaev balance",
       {{"pohozaev", "flat_relative_residual"},
        {"pohozaev", "curved_slope_deviation"},
        {"pohozaev", "radial_third_mismatches"}}},
      {6,
       "conformal structure",
       {{"cnc", "covariance_order_deviation"}, {"cnc", "sphere_q_curvature"}, {"cnc", "gauss_bonnet_relative"}}},
      {7, "normal-coordinate algebra", {{"cnc", "exact_identity_failures"}, {"cnc", "cnc_suite_failures"}}},
      {8, "distance comparison", {{"distance", "c_spread"}, {"distance", "eps_exponent_deviation"}}},
      {9,
       "long-range rings",
       {{"longrange", "slope"}, {"longrange", "laplacian_L2"}, {"longrange", "d_laplacian_L3"}}},
      {10,
       "vanishing-rate balance",
       {{"vrate", "tuned_balance"}, {"vrate", "untuned_vs_spectral_oracle"}}},
  };
  return list;
}

}  // namespace

int main() {
  const qlab::Config cfg;
  std::map<std::string, qlab::Report> reports;
  std::map<std::string, std::string> aborted;
  for (const auto& c : criteria())
    for (const auto& [command, _] : c.checks) {
      if (reports.contains(command) || aborted.contains(command)) continue;
      try {
        reports.emplace(command, qlab::run_command(command, cfg));
      } catch (const std::exception& e) {
        aborted.emplace(command, e.what());
      }
    }

  int unexpected = 0;
  for (const auto& c : criteria()) {
    bool pass = true;
    std::string detail;
    for (const auto& [command, name] : c.checks) {
      if (auto it = aborted.find(command); it != aborted.end()) {
        pass = false;
        detail += fmt::format(" {}: aborted ({});", command, it->second);
        continue;
      }
      const auto& checks = reports.at(command).checks;
      const auto hit = std::find_if(checks.begin(), checks.end(), [&](const auto& k) { return k.name == name; });
      if (hit == checks.end()) {
        pass = false;
        detail += fmt::format(" {}/{} missing;", command, name);
        continue;
      }
      pass = pass && hit->pass;
      detail += fmt::format(" {}={:.3e}<={:.3e}{};", name, hit->value, hit->bound, hit->pass ? "" : " (fail)");
    }
    if (!detail.empty()) detail.pop_back();
    const bool known = kKnownFailing.contains(c.id);
    if (!pass && !known) ++unexpected;
    std::cout << fmt::format("criterion {}: {} {}:{}\n", c.id, pass ? "PASS" : (known ? "FAIL (known)" : "FAIL"),
                             c.title, detail);
  }
  return unexpected == 0 ? 0 : 1;
}
