#include "hellinger/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

namespace hellinger {

namespace {

constexpr double kPi = std::numbers::pi;

/// Rethrows component errors with the pipeline stage prepended.
template <typename F>
auto stage(const char* name, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const SolverError& e) {
    throw SolverError(e.kind(), std::string(name) + ": " + e.message(), e.trace());
  } catch (const Error& e) {
    throw Error(e.kind(), std::string(name) + ": " + e.message());
  }
}

Matrix real_pole_block(Complex p) {
  Matrix blk(2, 2);
  blk << p.real(), p.imag(), -p.imag(), p.real();
  return blk;
}

/// Monic polynomial in z^{-1} with the given roots: prod (1 - r z^{-1}).
CVector poly_from_roots(const CVector& roots) {
  CVector c = CVector::Zero(roots.size() + 1);
  c(0) = 1.0;
  for (Eigen::Index k = 0; k < roots.size(); ++k) {
    for (Eigen::Index j = k + 1; j >= 1; --j) c(j) -= roots(k) * c(j - 1);
  }
  return c;
}

}  // namespace

TimeSeries::TimeSeries(Matrix v) : values(std::move(v)) {
  if (!values.allFinite()) throw Error(ErrorKind::InvalidArgument, "TimeSeries: non-finite sample");
}

// --- filter banks -------------------------------------------------------------

FilterBank covariance_extension_bank(int n) {
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "covariance_extension_bank: n < 1");
  Matrix a = Matrix::Zero(n, n);
  for (int i = 0; i + 1 < n; ++i) a(i, i + 1) = 1.0;
  Matrix b = Matrix::Zero(n, 1);
  b(n - 1, 0) = 1.0;
  return FilterBank(a, b);
}

FilterBank pole_bank(const std::vector<Complex>& poles, bool real_structured) {
  const auto n = static_cast<Eigen::Index>(poles.size());
  if (n == 0) throw Error(ErrorKind::InvalidArgument, "pole_bank: no poles");
  for (std::size_t i = 0; i < poles.size(); ++i) {
    if (!(std::abs(poles[i]) < 1.0 - kStabilityMargin)) {
      throw Error(ErrorKind::PoleOutsideDisk, "pole_bank: pole " + std::to_string(i));
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (std::abs(poles[i] - poles[j]) < 1e-12) {
        throw Error(ErrorKind::DuplicatePole, "pole_bank: pole " + std::to_string(i));
      }
    }
  }
  Matrix a = Matrix::Zero(n, n);
  Matrix b = Matrix::Ones(n, 1);
  if (!real_structured) {
    for (Eigen::Index i = 0; i < n; ++i) a(i, i) = poles[static_cast<std::size_t>(i)];
    return FilterBank(a, b);
  }
  std::vector<bool> used(poles.size(), false);
  Eigen::Index pos = 0;
  for (std::size_t i = 0; i < poles.size(); ++i) {
    if (used[i]) continue;
    used[i] = true;
    const Complex p = poles[i];
    if (std::abs(p.imag()) < 1e-14) {
      a(pos, pos) = p.real();
      ++pos;
      continue;
    }
    std::size_t partner = poles.size();
    for (std::size_t j = i + 1; j < poles.size(); ++j) {
      if (!used[j] && std::abs(poles[j] - std::conj(p)) < 1e-12) {
        partner = j;
        break;
      }
    }
    if (partner == poles.size()) {
      throw Error(ErrorKind::InvalidArgument, "pole_bank: unpaired complex pole " + std::to_string(i));
    }
    used[partner] = true;
    a.block(pos, pos, 2, 2) = real_pole_block(p.imag() > 0 ? p : std::conj(p));
    pos += 2;
  }
  return FilterBank(a, b);
}

std::vector<Complex> sinusoid_bank_poles() {
  std::vector<Complex> poles{0.0, 0.85, -0.85};
  for (double w : {0.42, 0.44, 0.46, 0.48, 0.50}) {
    poles.push_back(std::polar(0.9, w));
    poles.push_back(std::polar(0.9, -w));
  }
  return poles;
}

FilterBank sinusoid_bank() { return pole_bank(sinusoid_bank_poles(), true); }

FilterBank bivariate_bank() {
  const Eigen::Index n = 9;
  Matrix a = Matrix::Zero(n, n);
  Matrix b = Matrix::Zero(n, 2);
  b(0, 0) = 1.0;
  b(0, 1) = 1.0;
  for (int k = 1; k <= 4; ++k) {
    const Eigen::Index pos = 2 * k - 1;
    a.block(pos, pos, 2, 2) = real_pole_block(std::polar(0.9, k * kPi / 5.0));
    b.block(pos, 0, 2, 2) = Matrix::Identity(2, 2);
  }
  return FilterBank(a, b);
}

// --- covariance and priors ---------------------------------------------------------

int default_burn_in(Eigen::Index states, Eigen::Index samples) {
  const auto preferred = std::max<Eigen::Index>(10 * states, 100);
  const Eigen::Index room = samples - 10 * states;
  return static_cast<int>(std::max<Eigen::Index>(0, std::min(preferred, room)));
}

HermitianMatrix filter_covariance(const FilterBank& g, const TimeSeries& y, int burn_in) {
  const Eigen::Index n = g.states();
  const Eigen::Index big_n = y.size();
  if (y.dim() != g.inputs()) throw Error(ErrorKind::DimensionMismatch, "filter_covariance");
  if (burn_in < 0 || big_n - burn_in < 10 * n) {
    throw Error(ErrorKind::TooFewSamples,
                "filter_covariance: need N - M >= 10 n (N = " + std::to_string(big_n) +
                    ", M = " + std::to_string(burn_in) + ", n = " + std::to_string(n) + ")");
  }
  CVector x = CVector::Zero(n);
  Matrix acc = Matrix::Zero(n, n);
  for (Eigen::Index t = 0; t < big_n; ++t) {
    x = g.A() * x + g.B() * y.values.row(t).transpose();
    if (t + 1 > burn_in) acc.noalias() += x * x.adjoint();
  }
  return HermitianMatrix(acc / static_cast<double>(big_n - burn_in));
}

HermitianMatrix prepare_sigma(const GammaBasis& basis, const HermitianMatrix& sigma_hat) {
  HermitianMatrix proj = project_onto_range(basis, sigma_hat);
  const double lmin = min_eigenvalue(proj);
  if (!(lmin > kProjectionPDTol * proj.norm())) {
    throw Error(ErrorKind::ProjectionNotPD,
                "projected covariance has minimum eigenvalue " + std::to_string(lmin));
  }
  return proj;
}

HermitianMatrix sample_covariance(const TimeSeries& y) {
  if (y.size() < 2) throw Error(ErrorKind::TooFewSamples, "sample_covariance: N < 2");
  // Rows are samples, so sum_i y_i y_i* = Y^T conj(Y).
  return HermitianMatrix(y.values.transpose() * y.values.conjugate() /
                         static_cast<double>(y.size() - 1));
}

Prior constant_prior(const TimeSeries& y) {
  const HermitianMatrix s = sample_covariance(y);
  if (!(min_eigenvalue(s) > 0.0)) {
    throw Error(ErrorKind::DegenerateSamples, "sample covariance is not positive definite");
  }
  return Prior::constant(s);
}

Realization rational_filter(const CVector& num, const CVector& den) {
  if (num.size() == 0 || den.size() == 0 || den(0) != Complex(1.0, 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "rational_filter: need den_0 = 1");
  }
  const Eigen::Index p = std::max(num.size(), den.size()) - 1;
  CVector nu = CVector::Zero(p + 1);
  CVector de = CVector::Zero(p + 1);
  nu.head(num.size()) = num;
  de.head(den.size()) = den;
  if (p == 0) return Realization::constant(Matrix::Constant(1, 1, nu(0)));
  Matrix a = Matrix::Zero(p, p);
  a.row(0) = -de.tail(p).transpose();
  for (Eigen::Index i = 1; i < p; ++i) a(i, i - 1) = 1.0;
  Matrix b = Matrix::Zero(p, 1);
  b(0, 0) = 1.0;
  Matrix c = (nu.tail(p) - nu(0) * de.tail(p)).transpose();
  return Realization(a, b, c, Matrix::Constant(1, 1, nu(0)));
}

Realization ArModel::factor() const {
  CVector den(a.size() + 1);
  den(0) = 1.0;
  den.tail(a.size()) = a;
  CVector num(1);
  num(0) = sigma_e;
  return rational_filter(num, den);
}

ArModel fit_yule_walker(const TimeSeries& y, int order) {
  if (y.dim() != 1) throw Error(ErrorKind::DimensionMismatch, "fit_yule_walker: scalar series only");
  if (order < 0 || order > 10) throw Error(ErrorKind::InvalidArgument, "fit_yule_walker: order in 0..10");
  const Eigen::Index big_n = y.size();
  if (big_n <= order + 1) throw Error(ErrorKind::TooFewSamples, "fit_yule_walker");
  const CVector v = y.values.col(0);

  CVector r(order + 1);
  for (int k = 0; k <= order; ++k) {
    Complex acc = 0.0;
    for (Eigen::Index t = 0; t + k < big_n; ++t) acc += v(t + k) * std::conj(v(t));
    r(k) = acc / static_cast<double>(big_n);
  }
  ArModel model;
  if (order == 0) {
    model.a = CVector(0);
    model.sigma_e = std::sqrt(std::max(0.0, r(0).real()));
    if (!(model.sigma_e > 0.0)) throw Error(ErrorKind::SingularToeplitz, "zero autocovariance");
    return model;
  }
  Matrix toep(order, order);
  for (int i = 0; i < order; ++i) {
    for (int j = 0; j < order; ++j) toep(i, j) = i >= j ? r(i - j) : std::conj(r(j - i));
  }
  const HermitianMatrix th(toep);
  if (!(min_eigenvalue(th) > 1e-12 * std::max(r(0).real(), 1e-300))) {
    throw Error(ErrorKind::SingularToeplitz, "autocovariance Toeplitz matrix is singular");
  }
  CVector a = th.matrix().ldlt().solve(-r.tail(order));
  double s2 = r(0).real() + (a.dot(r.tail(order))).real();  // r_0 + sum a_j conj(r_j)

  // Reflect roots of z^p a(z) lying on or outside the unit circle.
  Matrix comp = Matrix::Zero(order, order);
  comp.row(0) = -a.transpose();
  for (int i = 1; i < order; ++i) comp(i, i - 1) = 1.0;
  CVector roots = Eigen::ComplexEigenSolver<Matrix>(comp, false).eigenvalues();
  bool reflected = false;
  double sigma = std::sqrt(std::max(s2, 0.0));
  for (Eigen::Index k = 0; k < roots.size(); ++k) {
    const double mag = std::abs(roots(k));
    if (mag >= 1.0 - kStabilityMargin) {
      if (std::abs(mag - 1.0) < 1e-12) {
        throw Error(ErrorKind::SingularToeplitz, "AR root on the unit circle");
      }
      roots(k) = 1.0 / std::conj(roots(k));
      sigma /= mag;
      reflected = true;
    }
  }
  if (reflected) a = poly_from_roots(roots).tail(order);
  if (!(sigma > 0.0)) throw Error(ErrorKind::SingularToeplitz, "zero innovation variance");
  model.a = a;
  model.sigma_e = sigma;
  return model;
}

Prior ar_prior(const ArModel& model) { return Prior::from_left_factor(model.factor()); }

Prior yule_walker_prior(const TimeSeries& y, int order) {
  if (order == 0) return constant_prior(y);
  return ar_prior(fit_yule_walker(y, order));
}

// --- simulation ----------------------------------------------------------------------

RealVector arma_ar_coefficients() {
  RealVector a(6);
  a << 1.0, -0.5, 0.42, -0.602, 0.0425, -0.1192;
  return a;
}

RealVector arma_ma_coefficients() {
  RealVector c(4);
  c << 1.0, 1.1, 0.08, -0.15;
  return c;
}

Realization arma_true_factor() {
  return rational_filter(arma_ma_coefficients().cast<Complex>(), arma_ar_coefficients().cast<Complex>());
}

Scenario generate_arma_example(int n_samples, std::uint64_t seed) {
  if (n_samples < 1) throw Error(ErrorKind::InvalidArgument, "n_samples < 1");
  const RealVector a = arma_ar_coefficients();
  const RealVector c = arma_ma_coefficients();
  const int warmup = 1000;
  const int total = warmup + n_samples;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> y(static_cast<std::size_t>(total), 0.0);
  std::vector<double> e(static_cast<std::size_t>(total), 0.0);
  for (int t = 0; t < total; ++t) {
    e[static_cast<std::size_t>(t)] = normal(rng);
    double v = 0.0;
    for (int k = 1; k < a.size() && k <= t; ++k) v -= a(k) * y[static_cast<std::size_t>(t - k)];
    for (int k = 0; k < c.size() && k <= t; ++k) v += c(k) * e[static_cast<std::size_t>(t - k)];
    y[static_cast<std::size_t>(t)] = v;
  }
  Matrix values(n_samples, 1);
  for (int t = 0; t < n_samples; ++t) values(t, 0) = y[static_cast<std::size_t>(warmup + t)];
  return Scenario{TimeSeries(values), arma_true_factor(), {}};
}

Realization sinusoid_noise_factor() {
  CVector num(2);
  num << 0.5, 0.25;
  CVector den(2);
  den << 1.0, -0.8;
  return rational_filter(num, den);
}

Scenario generate_sinusoids_example(int n_samples, std::uint64_t seed, SinusoidOptions options) {
  if (n_samples < 1) throw Error(ErrorKind::InvalidArgument, "n_samples < 1");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double phi1 = normal(rng);
  const double phi2 = normal(rng);
  const int warmup = 1000;
  double z = 0.0;
  double nu_prev = normal(rng);
  Matrix values(n_samples, 1);
  for (int t = -warmup; t < n_samples; ++t) {
    const double nu = normal(rng);
    z = 0.8 * z + 0.5 * nu + 0.25 * nu_prev;
    nu_prev = nu;
    if (t < 0) continue;
    double v = 0.0;
    if (options.include_lines) {
      v += 0.5 * std::sin(kOmega1 * t + phi1) + 0.5 * std::sin(kOmega2 * t + phi2);
    }
    if (options.include_noise) v += z;
    values(t, 0) = v;
  }
  Scenario s;
  s.data = TimeSeries(values);
  s.true_factor = options.include_noise ? sinusoid_noise_factor()
                                        : Realization::constant(Matrix::Zero(1, 1));
  if (options.include_lines) s.line_angles = {kOmega1, kOmega2};
  return s;
}

Realization bivariate_shaping_filter(std::uint64_t filter_seed) {
  std::mt19937_64 rng(filter_seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  const Eigen::Index n = 38;
  Matrix a = Matrix::Zero(n, n);
  a.block(0, 0, 2, 2) = real_pole_block(std::polar(0.9, 0.52));
  for (Eigen::Index pos = 2; pos < n; pos += 2) {
    const double radius = 0.95 * std::sqrt(unif(rng));
    const double angle = kPi * unif(rng);
    a.block(pos, pos, 2, 2) = real_pole_block(std::polar(radius, angle));
  }
  auto gaussian = [&](Eigen::Index r, Eigen::Index c) {
    Matrix m(r, c);
    for (Eigen::Index i = 0; i < r; ++i) {
      for (Eigen::Index j = 0; j < c; ++j) m(i, j) = normal(rng);
    }
    return m;
  };
  Matrix b = gaussian(n, 2);
  Matrix c = gaussian(2, n);
  Matrix d = gaussian(2, 2);
  const Realization w_rand(a, b, c, d);

  const double rho = 1.0 - 1e-5;
  Matrix fa(2, 2);
  fa << 0.0, 0.0, 1.0, 0.0;
  Matrix fb = Matrix::Zero(2, 2);
  fb(0, 0) = 1.0;
  Matrix fc = Matrix::Zero(2, 2);
  fc(0, 0) = -2.0 * rho * std::cos(0.2);
  fc(0, 1) = rho * rho;
  const Realization zero_pair(fa, fb, fc, Matrix::Identity(2, 2));
  return series(w_rand, zero_pair);
}

TimeSeries simulate_realization(const Realization& w, int n_samples, std::uint64_t seed, int warmup) {
  if (n_samples < 1 || warmup < 0) throw Error(ErrorKind::InvalidArgument, "simulate_realization");
  if (w.states() > 0 && !is_stable(w.A)) throw Error(ErrorKind::NotStable, "simulate_realization");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  CVector x = CVector::Zero(w.states());
  CVector e(w.inputs());
  Matrix values(n_samples, w.outputs());
  for (int t = -warmup; t < n_samples; ++t) {
    for (Eigen::Index i = 0; i < e.size(); ++i) e(i) = normal(rng);
    if (t >= 0) values.row(t) = (w.C * x + w.D * e).transpose();
    x = w.A * x + w.B * e;
  }
  return TimeSeries(values);
}

Scenario generate_bivariate_example(int n_samples, std::uint64_t seed, std::uint64_t filter_seed) {
  Realization w = bivariate_shaping_filter(filter_seed);
  TimeSeries data = simulate_realization(w, n_samples, seed);
  return Scenario{std::move(data), std::move(w), {}};
}

// --- estimation pipeline ----------------------------------------------------------------

Approximation approximate(const FilterBank& g, const HermitianMatrix& sigma, const Prior& prior,
                          const SolverConfig& config) {
  Approximation res;
  const FeasibilityResult feas = stage("feasibility", [&] {
    return feasibility_check(build_gamma_basis(g), sigma, config.feasibility_tol);
  });
  if (!feas.feasible) {
    throw Error(ErrorKind::Infeasible,
                "Sigma is not in Range Gamma (residual " + std::to_string(feas.residual) + ")");
  }
  const FilterBank normalized = stage("normalization", [&] { return normalize_to_identity(g, sigma); });
  res.problem = stage("setup", [&] { return Problem::create(normalized, prior); });
  // I is only known to about eps * cond(Sigma) after the change of basis.
  SolverConfig solver = config;
  const double cond = max_eigenvalue(sigma) / min_eigenvalue(sigma);
  solver.feasibility_tol = std::max(solver.feasibility_tol, kRoundingFeasibilityFactor * cond);
  res.solution = stage("solve", [&] { return solve(res.problem, solver); });
  res.w_hat = stage("spectrum", [&] { return optimal_spectrum(res.problem, res.solution.lambda); });
  const Matrix s_inv_half = hermitian_inv_sqrt(sigma).matrix();
  res.lambda = HermitianMatrix(s_inv_half * res.solution.lambda.matrix.matrix() * s_inv_half);
  return res;
}

EstimationResult estimate_spectrum(const TimeSeries& y, const FilterBank& g,
                                   const EstimationConfig& config) {
  EstimationResult res;
  const int burn_in = config.burn_in >= 0 ? config.burn_in : default_burn_in(g.states(), y.size());
  res.sigma_hat = stage("covariance", [&] { return filter_covariance(g, y, burn_in); });
  const GammaBasis basis = stage("projection", [&] { return build_gamma_basis(g); });
  res.sigma_projected = stage("projection", [&] { return prepare_sigma(basis, res.sigma_hat); });
  res.prior = stage("prior", [&] {
    switch (config.prior.kind) {
      case PriorKind::YuleWalker:
        return yule_walker_prior(y, config.prior.order);
      case PriorKind::UserAr:
        return ar_prior(config.prior.user);
      case PriorKind::Constant:
      default:
        return constant_prior(y);
    }
  });
  Approximation approx = approximate(g, res.sigma_projected, res.prior, config.solver);
  res.problem = std::move(approx.problem);
  res.solution = std::move(approx.solution);
  res.w_hat = std::move(approx.w_hat);
  res.lambda = std::move(approx.lambda);

  stage("diagnostics", [&] {
    const HermitianMatrix moment = gamma_apply(g, res.w_hat);
    res.constraint_residual = (moment - res.sigma_projected).norm() / res.sigma_projected.norm();
    const FrequencyGrid grid(config.solver.grid_check);
    res.hellinger = hellinger_distance(sample_left_spectrum(res.prior.W_psi.realization, grid),
                                       sample_left_spectrum(res.w_hat.realization, grid));
    return 0;
  });
  return res;
}

// --- spectra on grids -----------------------------------------------------------------

RealVector average_error_curve(const std::vector<std::vector<Matrix>>& estimates,
                               const std::vector<Matrix>& truth) {
  if (estimates.empty()) throw Error(ErrorKind::InvalidArgument, "average_error_curve: no runs");
  RealVector e = RealVector::Zero(static_cast<Eigen::Index>(truth.size()));
  for (const auto& run : estimates) {
    if (run.size() != truth.size()) {
      throw Error(ErrorKind::DimensionMismatch, "average_error_curve: grid mismatch");
    }
    for (std::size_t k = 0; k < truth.size(); ++k) {
      const Matrix diff = run[k] - truth[k];
      Eigen::JacobiSVD<Matrix> svd(diff);
      e(static_cast<Eigen::Index>(k)) += svd.singularValues()(0);
    }
  }
  return e / static_cast<double>(estimates.size());
}

std::vector<double> dominant_peaks(const std::vector<double>& thetas,
                                   const std::vector<double>& values, int count) {
  if (thetas.size() != values.size()) throw Error(ErrorKind::DimensionMismatch, "dominant_peaks");
  std::vector<std::size_t> peaks;
  for (std::size_t i = 1; i + 1 < values.size(); ++i) {
    if (values[i] > values[i - 1] && values[i] > values[i + 1]) peaks.push_back(i);
  }
  std::stable_sort(peaks.begin(), peaks.end(),
                   [&](std::size_t x, std::size_t y) { return values[x] > values[y]; });
  std::vector<double> out;
  for (std::size_t k = 0; k < peaks.size() && static_cast<int>(k) < count; ++k) {
    out.push_back(thetas[peaks[k]]);
  }
  return out;
}

}  // namespace hellinger
