#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace hellinger {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

enum class ErrorKind {
  DimensionMismatch,
  NotStable,
  NoStabilizingSolution,
  NotPSD,
  NotPD,
  EmptyBasis,
  SingularResolvent,
  NotCoercive,
  SingularD,
  SingularObservabilityGramian,
  NotInDomain,
  DegenerateHessian,
  StepTooSmall,
  MaxIterations,
  DuplicatePole,
  PoleOutsideDisk,
  TooFewSamples,
  ProjectionNotPD,
  DegenerateSamples,
  SingularToeplitz,
  Infeasible,
  InvalidArgument,
  Io,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message),
        kind_(kind),
        message_(message) {}

  ErrorKind kind() const noexcept { return kind_; }
  /// The message without the kind prefix.
  const std::string& message() const noexcept { return message_; }

 private:
  ErrorKind kind_;
  std::string message_;
};

/// Stability margin: spectral radius must not exceed 1 - kStabilityMargin.
inline constexpr double kStabilityMargin = 1e-10;

/// Complex square matrix equal to its conjugate transpose. Construction
/// symmetrizes the input as (M + M*)/2.
class HermitianMatrix {
 public:
  HermitianMatrix() = default;
  explicit HermitianMatrix(const Matrix& m);
  static HermitianMatrix zero(Eigen::Index n) { return HermitianMatrix(Matrix::Zero(n, n)); }
  static HermitianMatrix identity(Eigen::Index n) {
    return HermitianMatrix(Matrix::Identity(n, n));
  }

  const Matrix& matrix() const noexcept { return m_; }
  Eigen::Index dim() const noexcept { return m_.rows(); }
  operator const Matrix&() const noexcept { return m_; }

  HermitianMatrix operator+(const HermitianMatrix& o) const;
  HermitianMatrix operator-(const HermitianMatrix& o) const;
  HermitianMatrix operator*(double s) const;
  double norm() const { return m_.norm(); }
  double trace() const { return m_.trace().real(); }

 private:
  Matrix m_;
};

inline HermitianMatrix operator*(double s, const HermitianMatrix& h) { return h * s; }

/// Real inner product <A,B> = Re tr(A B*) on Hermitian matrices.
double inner(const Matrix& a, const Matrix& b);

HermitianMatrix symmetrize(const Matrix& m);

double spectral_radius(const Matrix& a);
bool is_stable(const Matrix& a, double margin = kStabilityMargin);

double min_eigenvalue(const HermitianMatrix& m);
double max_eigenvalue(const HermitianMatrix& m);

/// S Hermitian PSD with S*S = M. Eigenvalues down to -1e-8*|M| are clipped.
HermitianMatrix hermitian_sqrt(const HermitianMatrix& m);
/// Inverse square root of a positive definite Hermitian matrix.
HermitianMatrix hermitian_inv_sqrt(const HermitianMatrix& m);

/// Solves X = A1 X A2* + Q (Stein / Sylvester-type) through complex Schur forms.
/// Requires |lambda_i(A1) * conj(lambda_j(A2))| != 1 for all pairs.
Matrix solve_stein(const Matrix& a1, const Matrix& a2, const Matrix& q);

/// Pi = A Pi A* + Q for stable A.
HermitianMatrix solve_discrete_lyapunov(const Matrix& a, const HermitianMatrix& q);

struct DareOptions {
  int max_doubling = 80;
  double residual_tol = 1e-9;
  int max_fixed_point = 20000;
};

/// Result of the general discrete Riccati solver.
struct DareSolution {
  HermitianMatrix X;
  Matrix closed_loop;  // F - B (R + B*XB)^{-1} (B*XF + S*)
  Matrix gain;         // (R + B*XB)^{-1} (B*XF + S*)
  double residual = 0.0;
};

/// Stabilizing solution of
///   X = F*XF - (F*XB + S)(R + B*XB)^{-1}(B*XF + S*) + Q
/// via structure-preserving doubling with Newton polishing and a damped
/// fixed-point fallback. R need only be Hermitian invertible. Throws
/// NoStabilizingSolution when no verified stabilizing solution is found.
DareSolution solve_dare_general(const Matrix& F, const Matrix& B, const HermitianMatrix& Q,
                                const HermitianMatrix& R, const Matrix& S,
                                const DareOptions& opts = {});

/// Stabilizing P of P = A*PA - A*PB(B*PB + I)^{-1}B*PA + Lambda.
HermitianMatrix solve_dare_stabilizing(const Matrix& a, const Matrix& b,
                                       const HermitianMatrix& lambda);

/// Residual of the map P -> A*PA - A*PB(B*PB+I)^{-1}B*PA + Lambda - P.
Matrix dare_residual(const Matrix& a, const Matrix& b, const HermitianMatrix& lambda,
                     const Matrix& p);

struct LeastSquaresSolution {
  RealVector coefficients;
  double residual_norm = 0.0;
  int rank = 0;
};

/// Minimum-norm real coefficients minimizing |sum_k a_k columns_k - target|_F.
LeastSquaresSolution least_squares(const std::vector<HermitianMatrix>& columns,
                                   const HermitianMatrix& target);

/// Real coordinates of a Hermitian matrix, isometric for <.,.>.
RealVector hermitian_to_real(const Matrix& m);

}  // namespace hellinger
