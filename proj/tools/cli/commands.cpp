#include "commands.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "io.hpp"

namespace hellinger::cli {

namespace fs = std::filesystem;
using io::Json;

namespace {

constexpr const char* kVersion = "hellinger 0.1.0";

Error usage(const std::string& what) { return Error(ErrorKind::InvalidArgument, what); }

void require_file(const fs::path& p) {
  if (!fs::is_regular_file(p)) throw Error(ErrorKind::Io, "no such file: " + p.string());
}

/// Manifest written before any output of a command.
class Manifest {
 public:
  explicit Manifest(const std::string& command) {
    j_["format_version"] = io::kFormatVersion;
    j_["command"] = command;
    j_["version"] = kVersion;
    j_["eigen"] = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                  std::to_string(EIGEN_MINOR_VERSION);
    j_["config"] = Json::object();
    j_["inputs"] = Json::array();
    j_["seed"] = nullptr;
    j_["outputs"] = Json::array();
  }

  Json& config() { return j_["config"]; }
  void seed(std::uint64_t s) { j_["seed"] = s; }
  void input(const std::string& role, const fs::path& p) {
    j_["inputs"].push_back(Json{{"role", role}, {"path", p.generic_string()}, {"fnv1a", io::fnv1a_file(p)}});
  }
  void output(const std::string& name) { j_["outputs"].push_back(name); }
  Json& raw() { return j_; }

  void write(const fs::path& dir) const { io::write_json(dir / "manifest.json", j_); }

 private:
  Json j_;
};

Json solver_json(const SolverFlags& s) {
  return Json{{"tol", s.tol}, {"alpha", s.alpha}, {"max_iters", s.max_iters}, {"grid", s.grid}};
}

void prepare_out_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::Io, "cannot create " + dir.string() + ": " + ec.message());
}

/// Runs f(0..count-1) on up to `jobs` threads. Each index owns its output.
void parallel_for(int count, int jobs, const std::function<void(int)>& f) {
  const int workers = std::max(1, std::min(jobs, count));
  if (workers == 1) {
    for (int k = 0; k < count; ++k) f(k);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int k = next++; k < count; k = next++) f(k);
    });
  }
  for (auto& t : pool) t.join();
}

void report(std::ostream& err, const Error& e) {
  err << "error: " << to_string(e.kind()) << ": " << e.message() << '\n';
}

void write_solution(const fs::path& dir, const Approximation& a, int grid) {
  Json lambda{{"format_version", io::kFormatVersion},
              {"lambda", io::to_json(a.lambda.matrix())},
              {"lambda_normalized", io::to_json(a.solution.lambda.matrix.matrix())},
              {"coords", io::to_json(a.solution.lambda.coords)},
              {"iterations", static_cast<int>(a.solution.trace.records.size()) - 1},
              {"grad_norm", a.solution.trace.records.back().grad_norm}};
  io::write_json(dir / "lambda.json", lambda);
  io::write_json(dir / "w_hat.json", Json{{"format_version", io::kFormatVersion},
                                          {"side", "left"},
                                          {"realization", io::to_json(a.w_hat.realization)}});
  const FrequencyGrid g(grid);
  io::write_spectrum(dir / "spectrum.csv", g.thetas(), sample_left_spectrum(a.w_hat.realization, g));
  io::write_trace(dir / "trace.csv", a.solution.trace);
}

/// Runs `body`, mapping library errors to exit codes. Solver failures still
/// leave their trace in `dir`.
int guarded(const fs::path& dir, std::ostream& err, const std::function<void()>& body) {
  try {
    body();
    return kExitOk;
  } catch (const SolverError& e) {
    report(err, e);
    try {
      io::write_trace(dir / "trace.csv", e.trace());
    } catch (const Error&) {
    }
    return exit_code_for(e.kind());
  } catch (const Error& e) {
    report(err, e);
    return exit_code_for(e.kind());
  }
}

Prior prior_from_json(const Json& j) {
  if (j.contains("W")) return Prior::from_left_factor(io::realization_from_json(j.at("W")));
  if (j.contains("psi")) return Prior::constant(HermitianMatrix(io::matrix_from_json(j.at("psi"))));
  throw Error(ErrorKind::Io, "prior needs \"W\" (left factor) or \"psi\" (constant)");
}

HermitianMatrix hermitian_from_json(const Json& j) {
  const Matrix m = io::matrix_from_json(j);
  if (m.rows() != m.cols()) throw Error(ErrorKind::Io, "Sigma must be square");
  if ((m - m.adjoint()).norm() > 1e-12 * (1.0 + m.norm())) {
    throw Error(ErrorKind::Io, "Sigma is not Hermitian");
  }
  return HermitianMatrix(m);
}

std::string run_label(const fs::path& data) {
  const std::string parent = data.parent_path().filename().string();
  return data.filename() == "data.csv" && !parent.empty() ? parent : data.stem().string();
}

std::string run_dir_name(int k) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "run_%03d", k);
  return buf;
}

}  // namespace

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Io:
    case ErrorKind::InvalidArgument:
    case ErrorKind::DimensionMismatch:
    case ErrorKind::TooFewSamples:
    case ErrorKind::DegenerateSamples:
    case ErrorKind::SingularToeplitz:
    case ErrorKind::DuplicatePole:
    case ErrorKind::PoleOutsideDisk:
    case ErrorKind::EmptyBasis:
      return kExitUsage;
    case ErrorKind::Infeasible:
    case ErrorKind::ProjectionNotPD:
      return kExitInfeasible;
    case ErrorKind::DegenerateHessian:
    case ErrorKind::StepTooSmall:
    case ErrorKind::MaxIterations:
      return kExitNoConvergence;
    default:
      return kExitDomain;
  }
}

fs::path default_out_dir() {
  const char* env = std::getenv(kOutDirEnv);
  return env && *env ? fs::path(env) : fs::path("hellinger_out");
}

FilterBank parse_bank_spec(const std::string& spec) {
  if (spec.rfind("covext:", 0) == 0) {
    int n = 0;
    try {
      n = static_cast<int>(io::parse_double(spec.substr(7)));
    } catch (const Error&) {
      throw usage("bad bank spec " + spec);
    }
    if (n < 1) throw usage("covext needs at least one lag");
    return covariance_extension_bank(n);
  }
  if (spec == "sinusoid") return sinusoid_bank();
  if (spec == "bivariate") return bivariate_bank();
  require_file(spec);
  return io::bank_from_json(io::read_json(spec));
}

PriorSpec parse_prior_spec(const std::string& spec) {
  PriorSpec p;
  if (spec == "constant") return p;
  if (spec.rfind("yw:", 0) == 0) {
    p.kind = PriorKind::YuleWalker;
    try {
      p.order = static_cast<int>(io::parse_double(spec.substr(3)));
    } catch (const Error&) {
      throw usage("bad prior spec " + spec);
    }
    if (p.order < 0) throw usage("Yule-Walker order must be nonnegative");
    return p;
  }
  if (spec.rfind("ar:", 0) == 0) {
    const fs::path file = spec.substr(3);
    require_file(file);
    p.kind = PriorKind::UserAr;
    p.user = io::ar_model_from_json(io::read_json(file));
    return p;
  }
  throw usage("prior must be constant, yw:K or ar:FILE, got " + spec);
}

SolverConfig SolverFlags::config() const {
  SolverConfig c;
  c.grad_tol = tol;
  c.alpha = alpha;
  c.max_iters = max_iters;
  c.grid_check = grid;
  return c;
}

// --- approx -----------------------------------------------------------------------

int cmd_approx(const ApproxOptions& opt, std::ostream& out, std::ostream& err) {
  FilterBank bank;
  HermitianMatrix sigma;
  Prior prior;
  try {
    require_file(opt.problem);
    const Json j = io::read_json(opt.problem);
    const Json& b = j.at("bank");
    bank = b.is_string() ? parse_bank_spec(b.get<std::string>()) : io::bank_from_json(b);
    sigma = hermitian_from_json(j.at("sigma"));
    prior = prior_from_json(j.at("prior"));
  } catch (const Json::exception& e) {
    err << "error: Io: " << opt.problem.string() << ": " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    report(err, e);
    return exit_code_for(e.kind());
  }

  return guarded(opt.out, err, [&] {
    prepare_out_dir(opt.out);
    Manifest m("approx");
    m.config()["solver"] = solver_json(opt.solver);
    m.input("problem", opt.problem);
    for (const char* f : {"lambda.json", "w_hat.json", "spectrum.csv", "trace.csv"}) m.output(f);
    m.write(opt.out);

    const Approximation a = approximate(bank, sigma, prior, opt.solver.config());
    write_solution(opt.out, a, opt.solver.grid);
    const IterationRecord& last = a.solution.trace.records.back();
    out << "converged in " << last.iter << " iterations, |grad| = " << io::format_double(last.grad_norm)
        << '\n';
  });
}

// --- estimate ---------------------------------------------------------------------

namespace {

int estimate_one(const EstimateOptions& opt, const fs::path& data, const FilterBank& bank,
                 const PriorSpec& prior, const fs::path& dir, std::ostream& out, std::ostream& err) {
  return guarded(dir, err, [&] {
    const TimeSeries y = io::read_time_series(data);
    prepare_out_dir(dir);
    Manifest m("estimate");
    m.config()["bank"] = opt.bank;
    m.config()["prior"] = opt.prior;
    m.config()["burn_in"] = opt.burn_in;
    m.config()["solver"] = solver_json(opt.solver);
    m.seed(opt.seed);
    m.input("data", data);
    if (prior.kind == PriorKind::UserAr) m.input("prior", opt.prior.substr(3));
    for (const char* f : {"lambda.json", "w_hat.json", "spectrum.csv", "trace.csv", "diagnostics.json"}) {
      m.output(f);
    }
    m.write(dir);

    EstimationConfig cfg;
    cfg.burn_in = opt.burn_in;
    cfg.prior = prior;
    cfg.solver = opt.solver.config();
    cfg.seed = opt.seed;
    const EstimationResult r = estimate_spectrum(y, bank, cfg);

    Approximation a{r.problem, r.solution, r.w_hat, r.lambda};
    write_solution(dir, a, opt.solver.grid);
    const int burn_in = opt.burn_in >= 0 ? opt.burn_in : default_burn_in(bank.states(), y.size());
    io::write_json(dir / "diagnostics.json",
                   Json{{"format_version", io::kFormatVersion},
                        {"hellinger", r.hellinger},
                        {"constraint_residual", r.constraint_residual},
                        {"burn_in", burn_in},
                        {"iterations", static_cast<int>(r.solution.trace.records.size()) - 1},
                        {"sigma_hat", io::to_json(r.sigma_hat.matrix())},
                        {"sigma_projected", io::to_json(r.sigma_projected.matrix())}});
    out << data.generic_string() << ": converged in " << r.solution.trace.records.back().iter
        << " iterations, d_H = " << io::format_double(r.hellinger) << '\n';
  });
}

}  // namespace

int cmd_estimate(const EstimateOptions& opt, std::ostream& out, std::ostream& err) {
  FilterBank bank;
  PriorSpec prior;
  std::vector<std::string> labels;
  try {
    if (opt.data.empty()) throw usage("no data files");
    for (const auto& d : opt.data) require_file(d);
    bank = parse_bank_spec(opt.bank);
    prior = parse_prior_spec(opt.prior);
    for (const auto& d : opt.data) labels.push_back(run_label(d));
    std::vector<std::string> sorted = labels;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      throw usage("data files map to the same output directory");
    }
  } catch (const Error& e) {
    report(err, e);
    return exit_code_for(e.kind());
  }

  if (opt.data.size() == 1) return estimate_one(opt, opt.data[0], bank, prior, opt.out, out, err);

  const int count = static_cast<int>(opt.data.size());
  std::vector<int> codes(static_cast<std::size_t>(count));
  std::vector<std::ostringstream> outs(static_cast<std::size_t>(count)), errs(static_cast<std::size_t>(count));
  parallel_for(count, opt.jobs, [&](int k) {
    const auto i = static_cast<std::size_t>(k);
    codes[i] = estimate_one(opt, opt.data[i], bank, prior, opt.out / labels[i], outs[i], errs[i]);
  });
  int worst = kExitOk;
  for (std::size_t i = 0; i < codes.size(); ++i) {
    out << outs[i].str();
    if (!errs[i].str().empty()) err << labels[i] << ": " << errs[i].str();
    worst = std::max(worst, codes[i]);
  }
  return worst;
}

// --- simulate ---------------------------------------------------------------------

namespace {

const char* scenario_name(Scenario s) {
  switch (s) {
    case Scenario::Arma:
      return "arma";
    case Scenario::Sinusoids:
      return "sinusoids";
    case Scenario::Bivariate:
      return "bivariate";
  }
  return "";
}

int default_samples(Scenario s) {
  switch (s) {
    case Scenario::Arma:
      return 500;
    case Scenario::Sinusoids:
      return 300;
    case Scenario::Bivariate:
      return 100;
  }
  return 0;
}

int simulate_one(const SimulateOptions& opt, std::uint64_t seed, const fs::path& dir, std::ostream& err) {
  return guarded(dir, err, [&] {
    const int n = opt.samples > 0 ? opt.samples : default_samples(opt.scenario);
    prepare_out_dir(dir);
    Manifest m("simulate");
    m.config()["scenario"] = scenario_name(opt.scenario);
    m.config()["samples"] = n;
    m.config()["grid"] = opt.grid;
    if (opt.scenario == Scenario::Bivariate) m.config()["filter_seed"] = opt.filter_seed;
    m.seed(seed);
    m.output("data.csv");
    m.output("true_spectrum.csv");
    m.write(dir);

    hellinger::Scenario sc;
    switch (opt.scenario) {
      case Scenario::Arma:
        sc = generate_arma_example(n, seed);
        break;
      case Scenario::Sinusoids:
        sc = generate_sinusoids_example(n, seed);
        break;
      case Scenario::Bivariate:
        sc = generate_bivariate_example(n, seed, opt.filter_seed);
        break;
    }
    io::write_time_series(dir / "data.csv", sc.data);
    const FrequencyGrid g(opt.grid);
    io::write_spectrum(dir / "true_spectrum.csv", g.thetas(), sample_left_spectrum(sc.true_factor, g));
  });
}

}  // namespace

int cmd_simulate(const SimulateOptions& opt, std::ostream& out, std::ostream& err) {
  if (opt.runs < 1 || opt.samples < 0 || opt.grid < 2) {
    err << "error: InvalidArgument: runs, samples and grid must be positive\n";
    return kExitUsage;
  }
  if (opt.runs == 1) {
    const int code = simulate_one(opt, opt.seed, opt.out, err);
    if (code == kExitOk) out << "wrote " << opt.out.generic_string() << '\n';
    return code;
  }

  const int code = guarded(opt.out, err, [&] {
    prepare_out_dir(opt.out);
    Manifest m("simulate");
    m.config()["scenario"] = scenario_name(opt.scenario);
    m.config()["runs"] = opt.runs;
    m.seed(opt.seed);
    for (int k = 0; k < opt.runs; ++k) m.output(run_dir_name(k));
    m.write(opt.out);
  });
  if (code != kExitOk) return code;

  std::vector<int> codes(static_cast<std::size_t>(opt.runs));
  std::vector<std::ostringstream> errs(static_cast<std::size_t>(opt.runs));
  parallel_for(opt.runs, opt.jobs, [&](int k) {
    const auto i = static_cast<std::size_t>(k);
    codes[i] = simulate_one(opt, opt.seed + static_cast<std::uint64_t>(k), opt.out / run_dir_name(k), errs[i]);
  });
  int worst = kExitOk;
  for (std::size_t i = 0; i < codes.size(); ++i) {
    err << errs[i].str();
    worst = std::max(worst, codes[i]);
  }
  if (worst == kExitOk) out << "wrote " << opt.runs << " runs to " << opt.out.generic_string() << '\n';
  return worst;
}

// --- error-curve ------------------------------------------------------------------

int cmd_error_curve(const ErrorCurveOptions& opt, std::ostream& out, std::ostream& err) {
  std::vector<fs::path> files;
  try {
    require_file(opt.truth);
    if (!fs::is_directory(opt.estimates)) {
      throw Error(ErrorKind::Io, "no such directory: " + opt.estimates.string());
    }
    for (const auto& entry : fs::directory_iterator(opt.estimates)) {
      const fs::path f = entry.path() / opt.spectrum_name;
      if (entry.is_directory() && fs::is_regular_file(f)) files.push_back(f);
    }
    std::sort(files.begin(), files.end());
    if (files.empty() && fs::is_regular_file(opt.estimates / opt.spectrum_name)) {
      files.push_back(opt.estimates / opt.spectrum_name);
    }
    if (files.empty()) throw Error(ErrorKind::Io, "no " + opt.spectrum_name + " under " + opt.estimates.string());
  } catch (const Error& e) {
    report(err, e);
    return kExitUsage;
  }

  return guarded(opt.out, err, [&] {
    const io::SpectrumTable truth = io::read_spectrum(opt.truth);
    std::vector<std::vector<Matrix>> runs;
    for (const auto& f : files) {
      io::SpectrumTable t = io::read_spectrum(f);
      bool same = t.thetas.size() == truth.thetas.size();
      for (std::size_t k = 0; same && k < t.thetas.size(); ++k) {
        same = std::abs(t.thetas[k] - truth.thetas[k]) <= 1e-12 &&
               t.values[k].rows() == truth.values[k].rows();
      }
      if (!same) throw Error(ErrorKind::DimensionMismatch, "grid mismatch: " + f.generic_string());
      runs.push_back(std::move(t.values));
    }

    prepare_out_dir(opt.out);
    Manifest m("error-curve");
    m.config()["spectrum_name"] = opt.spectrum_name;
    m.config()["peak_factor"] = opt.peak_factor;
    m.input("truth", opt.truth);
    for (const auto& f : files) m.input("estimate", f);
    m.output("e_curve.csv");
    m.output("summary.json");
    m.write(opt.out);

    const RealVector e = average_error_curve(runs, truth.values);
    io::write_curve(opt.out / "e_curve.csv", truth.thetas, e, "error");

    std::vector<double> sorted(e.data(), e.data() + e.size());
    std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(sorted.size() / 2),
                     sorted.end());
    const double median = sorted[sorted.size() / 2];
    const double limit = opt.peak_factor * median;
    Json peaks = Json::array();
    for (Eigen::Index k = 0; k < e.size(); ++k) {
      if (e(k) > limit) peaks.push_back(truth.thetas[static_cast<std::size_t>(k)]);
    }
    // A run is flagged when its own error alone lifts E above the limit.
    Json flagged = Json::array();
    const double r = static_cast<double>(runs.size());
    for (std::size_t i = 0; i < runs.size(); ++i) {
      double worst = 0.0;
      for (std::size_t k = 0; k < truth.values.size(); ++k) {
        worst = std::max(worst, Eigen::JacobiSVD<Matrix>(runs[i][k] - truth.values[k]).singularValues()(0));
      }
      if (worst / r > limit) flagged.push_back(files[i].parent_path().filename().generic_string());
    }
    io::write_json(opt.out / "summary.json", Json{{"format_version", io::kFormatVersion},
                                                  {"runs", runs.size()},
                                                  {"median", median},
                                                  {"max", e.maxCoeff()},
                                                  {"peaks_above_limit", peaks.size()},
                                                  {"flagged_runs", flagged}});
    out << runs.size() << " runs, median error " << io::format_double(median) << ", max "
        << io::format_double(e.maxCoeff()) << ", " << peaks.size() << " nodes above "
        << opt.peak_factor << "x median, " << flagged.size() << " flagged runs\n";
  });
}

// --- argument parsing -------------------------------------------------------------

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Spectral estimation by Hellinger-distance approximation", "hellinger"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  auto add_solver = [](CLI::App* c, SolverFlags& s) {
    c->add_option("--tol", s.tol, "gradient norm tolerance")->check(CLI::PositiveNumber);
    c->add_option("--alpha", s.alpha, "Armijo parameter in (0, 1/2)")->check(CLI::Range(1e-12, 0.4999999));
    c->add_option("--max-iters", s.max_iters, "Newton iteration limit")->check(CLI::NonNegativeNumber);
    c->add_option("--grid", s.grid, "frequency grid size")->check(CLI::Range(2, 1 << 22));
  };
  std::string out_dir;

  ApproxOptions ap;
  auto* approx = app.add_subcommand("approx", "solve a serialized approximation problem");
  approx->add_option("problem", ap.problem, "problem JSON")->required();
  approx->add_option("-o,--out", out_dir, "output directory");
  add_solver(approx, ap.solver);

  EstimateOptions es;
  std::vector<std::string> data;
  auto* estimate = app.add_subcommand("estimate", "estimate a spectrum from data");
  estimate->add_option("data", data, "data CSV files")->required();
  estimate->add_option("--bank", es.bank, "covext:N, sinusoid, bivariate or bank JSON")->required();
  estimate->add_option("--prior", es.prior, "constant, yw:K or ar:FILE");
  estimate->add_option("--burn-in", es.burn_in, "discarded filter states (default max(10n, 100))");
  estimate->add_option("--seed", es.seed, "recorded in the manifest");
  estimate->add_option("--jobs", es.jobs, "parallel runs")->check(CLI::PositiveNumber);
  estimate->add_option("-o,--out", out_dir, "output directory");
  add_solver(estimate, es.solver);

  SimulateOptions si;
  std::string scenario;
  auto* simulate = app.add_subcommand("simulate", "generate a test scenario");
  simulate->add_option("scenario", scenario, "arma, sinusoids or bivariate")
      ->required()
      ->check(CLI::IsMember({"arma", "sinusoids", "bivariate"}));
  simulate->add_option("-N,--samples", si.samples, "number of samples")->check(CLI::PositiveNumber);
  simulate->add_option("--seed", si.seed, "noise seed");
  simulate->add_option("--filter-seed", si.filter_seed, "seed of the bivariate shaping filter");
  simulate->add_option("--runs", si.runs, "independent runs with seeds seed, seed+1, ...")
      ->check(CLI::PositiveNumber);
  simulate->add_option("--jobs", si.jobs, "parallel runs")->check(CLI::PositiveNumber);
  simulate->add_option("--grid", si.grid, "grid of true_spectrum.csv")->check(CLI::Range(2, 1 << 22));
  simulate->add_option("-o,--out", out_dir, "output directory");

  ErrorCurveOptions ec;
  auto* curve = app.add_subcommand("error-curve", "average spectral-norm error over runs");
  curve->add_option("estimates", ec.estimates, "directory of run directories")->required();
  curve->add_option("truth", ec.truth, "true spectrum CSV")->required();
  curve->add_option("--spectrum-name", ec.spectrum_name, "spectrum file inside each run");
  curve->add_option("--peak-factor", ec.peak_factor, "peaks above this multiple of the median are reported")
      ->check(CLI::PositiveNumber);
  curve->add_option("-o,--out", out_dir, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o, r;
    const int code = app.exit(e, o, r);
    out << o.str();
    err << r.str();
    return code == 0 ? kExitOk : kExitUsage;
  }

  const fs::path dir = out_dir.empty() ? default_out_dir() : fs::path(out_dir);
  try {
    if (approx->parsed()) {
      ap.out = dir;
      return cmd_approx(ap, out, err);
    }
    if (estimate->parsed()) {
      es.out = dir;
      for (const auto& d : data) es.data.emplace_back(d);
      return cmd_estimate(es, out, err);
    }
    if (simulate->parsed()) {
      si.out = dir;
      si.scenario = scenario == "arma" ? Scenario::Arma
                    : scenario == "sinusoids" ? Scenario::Sinusoids
                                              : Scenario::Bivariate;
      return cmd_simulate(si, out, err);
    }
    ec.out = dir;
    return cmd_error_curve(ec, out, err);
  } catch (const Error& e) {
    report(err, e);
    return exit_code_for(e.kind());
  }
}

}  // namespace hellinger::cli
