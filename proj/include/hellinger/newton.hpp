#pragma once

#include <optional>
#include <vector>

#include "hellinger/gamma.hpp"

namespace hellinger {

/// Prior spectrum Psi = W W* with its right factor H (Psi = H* H).
struct Prior {
  SpectralFactor W_psi;
  SpectralFactor H_psi;

  /// Builds the prior from a stable square left factor; checks coercivity on
  /// a uniform grid of `grid_check` points.
  static Prior from_left_factor(const Realization& w, int grid_check = kDefaultGridSize);
  /// Constant spectrum Psi = Sigma (Hermitian positive definite).
  static Prior constant(const HermitianMatrix& psi);

  Eigen::Index dim() const noexcept { return W_psi.realization.outputs(); }
};

/// A normalized approximation problem: integral G Phi G* = I over the bank.
struct Problem {
  FilterBank bank;
  GammaBasis basis;
  Prior prior;

  static Problem create(FilterBank bank, Prior prior);
};

/// Lambda in Range Gamma with Q_Lambda > 0 on the unit circle.
struct LambdaPoint {
  RealVector coords;
  HermitianMatrix matrix;
  QFactorization qfact;
};

/// Throws NotInDomain if Q_Lambda cannot be factorized.
LambdaPoint make_lambda_point(const Problem& problem, const RealVector& coords);

struct SolverConfig {
  double alpha = 0.25;
  double grad_tol = 1e-9;
  int max_iters = 200;
  double t_min = 0x1p-40;
  int grid_check = kDefaultGridSize;
  /// Tolerance of the check that I lies in Range Gamma.
  double feasibility_tol = kFeasibilityTol;
};

struct IterationRecord {
  int iter = 0;
  double J = 0.0;
  double grad_norm = 0.0;
  double t = 0.0;       // step length that produced this iterate (0 for the start)
  int backtracks = 0;   // halvings spent producing this iterate
  double decrease = 0.0;  // J change of that step; can be below one ulp of J near the end
  double constraint_residual = 0.0;
};

struct SolverTrace {
  std::vector<IterationRecord> records;
};

/// Solver failure carrying the trace accumulated so far.
class SolverError : public Error {
 public:
  SolverError(ErrorKind kind, const std::string& what, SolverTrace trace)
      : Error(kind, what), trace_(std::move(trace)) {}
  const SolverTrace& trace() const noexcept { return trace_; }

 private:
  SolverTrace trace_;
};

/// How the moment and Hessian integrals are evaluated. CrossGramian splits the
/// integrands into causal and anticausal parts and needs only Stein equations.
/// LeftFactor follows the left-factor chains (right_to_left, polarization with
/// minimum phase factors) and breaks down when observability Gramians are
/// nearly singular.
enum class IntegralRoute { CrossGramian, LeftFactor };

/// J(Lambda) = tr integral Q^{-1} Psi + tr Lambda.
double eval_J(const Problem& problem, const LambdaPoint& point);

/// integral G Q^{-1} Psi Q^{-1} G*, the moment of the candidate optimum.
HermitianMatrix eval_moment(const Problem& problem, const LambdaPoint& point,
                            IntegralRoute route = IntegralRoute::CrossGramian);

/// Coordinates of I - integral G Q^{-1} Psi Q^{-1} G* over the orthonormal basis.
RealVector eval_gradient(const Problem& problem, const LambdaPoint& point,
                         IntegralRoute route = IntegralRoute::CrossGramian);

/// Hessian entries H(E_k, E_l) over the orthonormal basis.
RealMatrix eval_hessian_matrix(const Problem& problem, const LambdaPoint& point,
                               IntegralRoute route = IntegralRoute::CrossGramian);

/// Least-squares solution of H * step = -gradient. Throws DegenerateHessian.
RealVector newton_step(const RealMatrix& hessian, const RealVector& gradient);

struct BacktrackResult {
  double t = 1.0;
  int backtracks = 0;
  double J = 0.0;
  double decrease = 0.0;
  LambdaPoint next;
};

/// Below this predicted decrease (relative to 1 + |J|) the difference of two
/// evaluated J values is dominated by rounding; the decrease is then taken from
/// the trapezoidal rule on the directional derivative instead.
inline constexpr double kRoundoffDecrease = 1e-8;

BacktrackResult backtrack(const Problem& problem, const LambdaPoint& point, double j_value,
                          const RealVector& gradient, const RealVector& step,
                          const SolverConfig& config);

struct SolveResult {
  LambdaPoint lambda;
  SolverTrace trace;
};

/// Damped Newton iteration from Lambda_0 = 0, or from `start` when given.
SolveResult solve(const Problem& problem, const SolverConfig& config = {},
                  const std::optional<RealVector>& start = std::nullopt);

/// Left factor W_hat of Phi_hat = Q^{-1} Psi Q^{-1}.
SpectralFactor optimal_spectrum(const Problem& problem, const LambdaPoint& point);

/// Hellinger distance between two spectra sampled on the same grid.
double hellinger_distance(const std::vector<Matrix>& psi, const std::vector<Matrix>& phi);

}  // namespace hellinger
