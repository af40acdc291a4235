// qlab: runs the numerical check suites and writes JSON and CSV reports.
//
// Exit codes: 0 every check passed, 1 some check failed (or a suite aborted),
// 2 usage or configuration error.

#include <CLI11.hpp>
#include <fmt/format.h>
#include <iostream>

#include "qlab/config.hpp"
#include "qlab/harness.hpp"
#include "qlab/suites.hpp"

namespace {

constexpr int kPass = 0;
constexpr int kFail = 1;
constexpr int kUsage = 2;

std::string command_list() {
  std::string s;
  for (const auto& c : qlab::command_names()) s += (s.empty() ? "" : ", ") + c;
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical checks for fourth-order conformal bubbling estimates"};
  app.footer("\nCommands: " + command_list() +
             "\n\nExit codes: 0 all checks pass, 1 a check fails, 2 usage or config error.\n\n" +
             qlab::csv_column_help());

  std::string command, config_path, out_dir = "qlab-out";
  std::optional<std::uint64_t> seed;
  bool quiet = false;
  app.add_option("command", command, "Suite to run")->required()->check(CLI::IsMember(qlab::command_names()));
  app.add_option("--config", config_path, "INI configuration file")->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "Output directory for JSON and CSV files");
  app.add_option("--seed", seed, "Random seed, overriding the config");
  app.add_flag("--quiet", quiet, "Only print the overall verdict");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    if (code == 0) return kPass;
    std::cerr << "\n" << app.help();
    return kUsage;
  }

  qlab::Config cfg;
  try {
    if (!config_path.empty()) cfg = qlab::load_config(config_path);
    if (seed) cfg.seed = *seed;
    cfg.validate();
  } catch (const qlab::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kUsage;
  }

  qlab::Report report;
  try {
    report = qlab::run_command(command, cfg);
  } catch (const qlab::UnsupportedError& e) {
    std::cerr << "unsupported: " << e.what() << "\n";
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << command << " aborted: " << e.what() << "\n";
    return kFail;
  }

  try {
    report.write(out_dir);
  } catch (const std::exception& e) {
    std::cerr << "cannot write report: " << e.what() << "\n";
    return kUsage;
  }

  if (!quiet)
    for (const auto& c : report.checks)
      std::cout << fmt::format("{:<4} {:<44} value {:<12.4e} bound {:<10.3e} est {:.2e}\n", c.pass ? "PASS" : "FAIL",
                               c.name, c.value, c.bound, c.error_estimate);
  std::cout << fmt::format("{}: {}\n", command, report.pass() ? "PASS" : "FAIL");
  return report.pass() ? kPass : kFail;
}
