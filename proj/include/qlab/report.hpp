#pragma once

// Pass/fail reports written by the command-line harness.

#include <cstdint>
#include <filesystem>
#include <nlohmann/json.hpp>
#include <string>
#include <utility>
#include <vector>

namespace qlab {

struct Check {
  std::string name;
  double value = 0.0;
  double bound = 0.0;
  bool pass = false;
  double error_estimate = 0.0;
};

// pass when value <= bound and value is finite.
Check check_at_most(std::string name, double value, double bound, double error_estimate = 0.0);
// pass when flag is true; value is 1 or 0 against bound 1.
Check check_true(std::string name, bool flag);

struct Report {
  std::string command;
  std::uint64_t seed = 0;
  std::vector<Check> checks;
  nlohmann::json details = nlohmann::json::object();
  std::vector<std::pair<std::string, std::string>> csv;  // (file stem, content)

  bool pass() const;
  // {command, pass, checks:[{name, value, bound, pass, error_estimate}], seed, versions, details}
  nlohmann::json to_json() const;
  // <dir>/<command>.json and <dir>/<command>_<stem>.csv; creates dir.
  void write(const std::filesystem::path& dir) const;

  // Appends another report's checks and files, prefixed by its command name.
  void absorb(const Report& other);
};

nlohmann::json versions();

}  // namespace qlab
