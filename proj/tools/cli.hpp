#pragma once

// Command-line front end. Kept as a library so the tests can drive it without
// spawning processes.

#include <complex>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cavqed/model.hpp"

namespace cavqed::cli {

enum ExitCode : int { ok = 0, bad_arguments = 1, io_failure = 2, numerical_failure = 3 };

struct Grid {
  double start = 0.0;
  double stop = 0.0;
  double step = 1.0;

  /// "start:stop:step", stop included when it lies on the grid.
  static Grid parse(const std::string& text);
  std::vector<double> points() const;
  std::string to_string() const;
};

struct RunConfig {
  std::string command;
  SystemParams params;
  std::optional<Grid> grid;
  std::vector<int> n;
  std::size_t jobs = 0;
  std::string out;                 // empty: stdout
  std::string sweep_kind = "epsilon";
  std::complex<double> alpha{1.0 / 1.4142135623730951, 0.0};
  std::complex<double> beta{1.0 / 1.4142135623730951, 0.0};
  double stage1_offset = 0.0;      // added to the stage-1 phi_{-1} target
  std::string regime = "auto";
  bool g0_given = false;
  bool window_given = false;
};

/// Writes the CSV for an already-parsed configuration. Throws cavqed::Error.
void execute(const RunConfig& config, std::ostream& csv, std::ostream& log);

/// Full entry point: parses argv, runs, maps failures to exit codes.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace cavqed::cli
