#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hellinger/newton.hpp"

namespace hellinger {

/// N samples of an m-variate series, one sample per row.
struct TimeSeries {
  Matrix values;

  TimeSeries() = default;
  explicit TimeSeries(Matrix v);

  Eigen::Index size() const noexcept { return values.rows(); }
  Eigen::Index dim() const noexcept { return values.cols(); }
};

// --- filter banks -------------------------------------------------------------

/// Shift register: ones on the superdiagonal, B the last unit vector.
FilterBank covariance_extension_bank(int n);

/// Diagonal poles with B a column of ones. With `real_structured`, complex
/// poles must come in conjugate pairs and each pair becomes the real block
/// [[Re p, Im p], [-Im p, Re p]].
FilterBank pole_bank(const std::vector<Complex>& poles, bool real_structured = false);

/// 0, +-0.85 and five pairs 0.9 e^{+-j w}, w = 0.42, 0.44, ..., 0.50.
std::vector<Complex> sinusoid_bank_poles();
FilterBank sinusoid_bank();

/// Two-input bank: a pole at the origin and four pairs of radius 0.9 at
/// angles k pi / 5, each block fed by the identity (n = 9, m = 2).
FilterBank bivariate_bank();

// --- covariance and priors ---------------------------------------------------------

/// max(10 n, 100), lowered when fewer than 10 n samples would remain.
int default_burn_in(Eigen::Index states, Eigen::Index samples);

/// Sample covariance of the bank state driven by y from x_0 = 0, after
/// discarding the first `burn_in` states.
HermitianMatrix filter_covariance(const FilterBank& g, const TimeSeries& y, int burn_in);

/// Orthogonal projection onto Range Gamma, checked for positive definiteness.
HermitianMatrix prepare_sigma(const GammaBasis& basis, const HermitianMatrix& sigma_hat);

/// (1/(N-1)) sum y_i y_i*.
HermitianMatrix sample_covariance(const TimeSeries& y);
Prior constant_prior(const TimeSeries& y);

/// a(z) = 1 + a_1 z^{-1} + ... + a_p z^{-p}; W(z) = sigma_e / a(z).
struct ArModel {
  CVector a;
  double sigma_e = 1.0;

  Realization factor() const;
};

/// Yule-Walker fit from the biased sample autocovariance of a scalar series.
/// Roots of a(z) on or outside the unit circle are reflected inside.
ArModel fit_yule_walker(const TimeSeries& y, int order);
Prior ar_prior(const ArModel& model);
/// Order 0 gives the constant prior.
Prior yule_walker_prior(const TimeSeries& y, int order);

/// num(z) / den(z) with polynomials in z^{-1} and den_0 = 1 (direct form).
Realization rational_filter(const CVector& num, const CVector& den);

// --- simulation ----------------------------------------------------------------------

/// Generated data plus the exact spectrum of its purely nondeterministic part.
struct Scenario {
  TimeSeries data;
  Realization true_factor;          // Phi = W W*
  std::vector<double> line_angles;  // spectral lines not captured by true_factor
};

/// y(t) = 0.5 y(t-1) - 0.42 y(t-2) + 0.602 y(t-3) - 0.0425 y(t-4) + 0.1192 y(t-5)
///        + e(t) + 1.1 e(t-1) + 0.08 e(t-2) - 0.15 e(t-3).
RealVector arma_ar_coefficients();  // 1, -0.5, 0.42, -0.602, 0.0425, -0.1192
RealVector arma_ma_coefficients();  // 1, 1.1, 0.08, -0.15
Realization arma_true_factor();
Scenario generate_arma_example(int n_samples, std::uint64_t seed);

/// y(t) = 0.5 sin(0.42 t + phi1) + 0.5 sin(0.53 t + phi2) + z(t),
/// z(t) = 0.8 z(t-1) + 0.5 nu(t) + 0.25 nu(t-1).
inline constexpr double kOmega1 = 0.42;
inline constexpr double kOmega2 = 0.53;
Realization sinusoid_noise_factor();
struct SinusoidOptions {
  bool include_lines = true;
  bool include_noise = true;
};
Scenario generate_sinusoids_example(int n_samples, std::uint64_t seed,
                                    SinusoidOptions options = {});

/// Order-40 2x2 shaping filter: a fixed pole pair 0.9 e^{+-j 0.52}, 18 random
/// conjugate pole pairs with radius sqrt(U) * 0.95 and angle uniform in
/// (0, pi), normal B, C, D, followed by diag(f(z), 1) with
/// f(z) = 1 - 2 rho cos(0.2) z^{-1} + rho^2 z^{-2}, rho = 1 - 1e-5.
inline constexpr std::uint64_t kDefaultFilterSeed = 20080101;
Realization bivariate_shaping_filter(std::uint64_t filter_seed = kDefaultFilterSeed);
Scenario generate_bivariate_example(int n_samples, std::uint64_t seed,
                                    std::uint64_t filter_seed = kDefaultFilterSeed);

/// Drives a stable realization with unit-variance white noise and returns
/// `n_samples` outputs after `warmup` discarded steps.
TimeSeries simulate_realization(const Realization& w, int n_samples, std::uint64_t seed,
                                int warmup = 1000);

// --- estimation pipeline ----------------------------------------------------------------

enum class PriorKind { Constant, YuleWalker, UserAr };

struct PriorSpec {
  PriorKind kind = PriorKind::Constant;
  int order = 0;    // YuleWalker
  ArModel user;     // UserAr
};

/// The feasibility tolerance of the normalized problem is at least this
/// multiple of cond(Sigma_proj).
inline constexpr double kRoundingFeasibilityFactor = 64 * 2.220446049250313e-16;

/// Solution of the problem with moment Sigma over an unnormalized bank. The
/// solver runs on the bank normalized to Sigma = I; `lambda` maps the
/// multiplier back, Q = I + G* lambda G.
struct Approximation {
  Problem problem;
  SolveResult solution;
  SpectralFactor w_hat;
  HermitianMatrix lambda;
};

/// Checks Sigma against Range Gamma (Infeasible) and solves.
Approximation approximate(const FilterBank& g, const HermitianMatrix& sigma, const Prior& prior,
                          const SolverConfig& config = {});

struct EstimationConfig {
  int burn_in = -1;  // negative: default_burn_in
  PriorSpec prior;
  SolverConfig solver;
  std::uint64_t seed = 0;
};

struct EstimationResult {
  HermitianMatrix sigma_hat;
  HermitianMatrix sigma_projected;
  Prior prior;
  Problem problem;  // normalized bank, Sigma = I
  SolveResult solution;
  SpectralFactor w_hat;
  HermitianMatrix lambda;
  double constraint_residual = 0.0;  // ||Gamma(Phi_hat) - Sigma_proj|| / ||Sigma_proj||
  double hellinger = 0.0;            // d_H(Psi, Phi_hat) on the grid
};

EstimationResult estimate_spectrum(const TimeSeries& y, const FilterBank& g,
                                   const EstimationConfig& config);

// --- spectra on grids -----------------------------------------------------------------

/// E(theta) = (1/R) sum_i ||Phi_i(theta) - Phi(theta)||_2.
RealVector average_error_curve(const std::vector<std::vector<Matrix>>& estimates,
                               const std::vector<Matrix>& truth);

/// Angles of the `count` largest strict local maxima (endpoints excluded).
std::vector<double> dominant_peaks(const std::vector<double>& thetas,
                                   const std::vector<double>& values, int count);

}  // namespace hellinger
