#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "hellinger/estimation.hpp"

namespace hellinger::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 2,
  kExitInfeasible = 3,
  kExitDomain = 4,
  kExitNoConvergence = 5,
};

int exit_code_for(ErrorKind kind);

/// Environment variable naming the default output directory.
inline constexpr const char* kOutDirEnv = "HELLINGER_OUT_DIR";
std::filesystem::path default_out_dir();

/// covext:N, sinusoid, bivariate, or a JSON file holding {"A", "B"}.
FilterBank parse_bank_spec(const std::string& spec);
/// constant, yw:K, or ar:FILE with an AR model in JSON.
PriorSpec parse_prior_spec(const std::string& spec);

struct SolverFlags {
  double tol = 1e-9;
  double alpha = 0.25;
  int max_iters = 200;
  int grid = kDefaultGridSize;

  SolverConfig config() const;
};

struct ApproxOptions {
  std::filesystem::path problem;
  std::filesystem::path out;
  SolverFlags solver;
};

struct EstimateOptions {
  std::vector<std::filesystem::path> data;
  std::string bank;
  std::string prior = "constant";
  int burn_in = -1;
  std::uint64_t seed = 0;
  int jobs = 1;
  std::filesystem::path out;
  SolverFlags solver;
};

enum class Scenario { Arma, Sinusoids, Bivariate };

struct SimulateOptions {
  Scenario scenario = Scenario::Arma;
  int samples = 0;  // 0: scenario default
  std::uint64_t seed = 1;
  std::uint64_t filter_seed = kDefaultFilterSeed;
  int runs = 1;
  int jobs = 1;
  int grid = kDefaultGridSize;
  std::filesystem::path out;
};

struct ErrorCurveOptions {
  std::filesystem::path estimates;
  std::filesystem::path truth;
  std::filesystem::path out;
  std::string spectrum_name = "spectrum.csv";
  double peak_factor = 10.0;
};

int cmd_approx(const ApproxOptions& opt, std::ostream& out, std::ostream& err);
int cmd_estimate(const EstimateOptions& opt, std::ostream& out, std::ostream& err);
int cmd_simulate(const SimulateOptions& opt, std::ostream& out, std::ostream& err);
int cmd_error_curve(const ErrorCurveOptions& opt, std::ostream& out, std::ostream& err);

/// Parses argv and dispatches to a command.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace hellinger::cli
