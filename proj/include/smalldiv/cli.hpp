#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace smalldiv::cli {

inline constexpr const char* kVersion = "0.1.0";

enum ExitCode : int { kOk = 0, kVerdictFailure = 1, kInputError = 2 };

struct RunConfig {
  std::string command;
  std::string freq = "golden";

  std::optional<double> delta, Delta, rho, epsilon, tau, C, T_minus, T_plus, mu;
  std::optional<double> beta, beta_prime, delta_prime, delta_min, delta_max, tol;
  std::optional<long> N, Q, depth, n_max, seed, count, trials, max_index, steps, grid;

  std::string check;       // sweep: which bound
  std::string modes_path;  // solve / thm1: ModeMap JSON input
  std::string dump_path;   // partition CSV dump, solve output modes
  std::string cache_path;  // constants cache
  std::string format = "json";  // json | csv | text
  std::string output;           // empty: the out stream
};

// Validates and executes one command. Reports go to `out` (or config.output),
// diagnostics to `err`.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

// Parses argv into a RunConfig; throws std::invalid_argument on bad usage.
// An empty format means the command default (csv for table1, json otherwise).
RunConfig parse_command_line(const std::vector<std::string>& args);

int main(int argc, char** argv);

}  // namespace smalldiv::cli
