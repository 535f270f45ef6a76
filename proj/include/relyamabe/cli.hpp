#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "relyamabe/report_io.hpp"

namespace relyamabe {

enum ExitCode : int {
  kExitOk = 0,
  kExitNumerical = 1,
  kExitInvalidInput = 2,
};

/// Maps an error kind to the process exit code.
int exit_code_for(ErrorKind kind);

/// Parses "round", "round-hemisphere", "berger:S,T", "spec:PATH" or a path
/// to a metric-spec JSON file.
MetricSpec parse_geometry(const std::string& text);

struct Range {
  double first = 0.0;
  double last = 0.0;
  int count = 1;
  std::vector<double> values() const;
};

/// "a:b:n" with n >= 2 and a < b, or n = 1 with a = b. Throws InvalidParams.
Range parse_range(const std::string& text);

/// Rows in s-major order; classification runs concurrently.
std::vector<SweepRow> run_sweep(const Range& s, const Range& t);

/// Entry point of the command-line tool. Reports go to --out or `out`;
/// diagnostics go to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
/// `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace relyamabe
