#pragma once

// Command suites run by the command-line harness.

#include <string>
#include <vector>

#include "qlab/config.hpp"
#include "qlab/report.hpp"

namespace qlab {

// Every command accepted by run_command, "all" last.
const std::vector<std::string>& command_names();

// Runs one suite. Throws std::invalid_argument for an unknown command;
// configuration problems surface as ConfigError.
Report run_command(const std::string& command, const Config& cfg);

// CSV files written per command and their columns, for --help.
std::string csv_column_help();

}  // namespace qlab
