#include "qlab/report.hpp"

#include <Eigen/Core>
#include <boost/version.hpp>
#include <cmath>
#include <fmt/format.h>
#include <fstream>
#include <gsl/gsl_version.h>
#include <stdexcept>

namespace qlab {

Check check_at_most(std::string name, double value, double bound, double error_estimate) {
  return Check{std::move(name), value, bound, std::isfinite(value) && value <= bound, error_estimate};
}

Check check_true(std::string name, bool flag) { return Check{std::move(name), flag ? 1.0 : 0.0, 1.0, flag, 0.0}; }

bool Report::pass() const {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

nlohmann::json Report::to_json() const {
  nlohmann::json checks_json = nlohmann::json::array();
  for (const auto& c : checks)
    checks_json.push_back({{"name", c.name},
                           {"value", c.value},
                           {"bound", c.bound},
                           {"pass", c.pass},
                           {"error_estimate", c.error_estimate}});
  return {{"command", command}, {"pass", pass()},        {"checks", checks_json},
          {"seed", seed},       {"versions", versions()}, {"details", details}};
}

void Report::write(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  auto put = [](const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    out << text;
    if (!out) throw std::runtime_error("failed writing '" + path.string() + "'");
  };
  put(dir / (command + ".json"), to_json().dump(2) + "\n");
  for (const auto& [stem, text] : csv) put(dir / (command + "_" + stem + ".csv"), text);
}

void Report::absorb(const Report& other) {
  for (auto c : other.checks) {
    c.name = other.command + "/" + c.name;
    checks.push_back(std::move(c));
  }
  details[other.command] = other.details;
  for (const auto& [stem, text] : other.csv) csv.emplace_back(other.command + "_" + stem, text);
}

nlohmann::json versions() {
  return {{"qlab", "1.0.0"},
          {"eigen", fmt::format("{}.{}.{}", EIGEN_WORLD_VERSION, EIGEN_MAJOR_VERSION, EIGEN_MINOR_VERSION)},
          {"boost", BOOST_LIB_VERSION},
          {"gsl", GSL_VERSION},
          {"json", fmt::format("{}.{}.{}", NLOHMANN_JSON_VERSION_MAJOR, NLOHMANN_JSON_VERSION_MINOR,
                               NLOHMANN_JSON_VERSION_PATCH)}};
}

}  // namespace qlab
