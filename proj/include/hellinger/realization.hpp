#pragma once

#include <vector>

#include "hellinger/core.hpp"

namespace hellinger {

/// State-space quadruple representing W(z) = C (zI - A)^{-1} B + D.
struct Realization {
  Matrix A;
  Matrix B;
  Matrix C;
  Matrix D;

  Realization() = default;
  Realization(Matrix a, Matrix b, Matrix c, Matrix d);

  /// Static gain D with no states.
  static Realization constant(const Matrix& d);
  /// G(z) = (zI - A)^{-1} B.
  static Realization filter(const Matrix& a, const Matrix& b);

  Eigen::Index states() const noexcept { return A.rows(); }
  Eigen::Index inputs() const noexcept { return D.cols(); }
  Eigen::Index outputs() const noexcept { return D.rows(); }
};

enum class FactorSide { Left, Right };

/// Left: Phi = W W*. Right: Phi = H* H.
struct SpectralFactor {
  Realization realization;
  FactorSide side = FactorSide::Left;
};

/// Z(z) with Phi = Z + Z*.
struct CausalPart {
  Realization realization;
};

/// Uniform angles -pi + 2*pi*k/count, k = 0..count-1.
class FrequencyGrid {
 public:
  explicit FrequencyGrid(int count);

  int count() const noexcept { return static_cast<int>(thetas_.size()); }
  double operator[](int k) const { return thetas_[static_cast<std::size_t>(k)]; }
  const std::vector<double>& thetas() const noexcept { return thetas_; }

 private:
  std::vector<double> thetas_;
};

inline constexpr int kDefaultGridSize = 2048;

// --- evaluation and algebra -------------------------------------------------

Matrix evaluate(const Realization& r, double theta);
Matrix evaluate_at(const Realization& r, Complex z);

/// F1(z) F2(z).
Realization series(const Realization& f1, const Realization& f2);
/// F1(z) + F2(z).
Realization parallel(const Realization& f1, const Realization& f2);
/// K F(z).
Realization left_multiply(const Matrix& k, const Realization& f);
/// F(z) K.
Realization right_multiply(const Realization& f, const Matrix& k);
/// Pointwise transpose F(z)^T (no conjugation).
Realization transpose(const Realization& f);

/// Controllable / observable subsystems via orthogonal staircase reduction.
/// Rank decisions use `tol` relative to the norm of B (first block) or A.
Realization controllable_part(const Realization& r, double tol = 1e-9);
Realization observable_part(const Realization& r, double tol = 1e-9);
Realization minimal_realization(const Realization& r, double tol = 1e-9);

/// Balanced realization of a stable system with Hankel singular values below
/// tol * max removed (transfer function error at most 2 * sum of those). Both
/// Gramians become diag(sigma), so weakly observed but energetic modes survive
/// with a well-conditioned observability Gramian. The staircase cannot isolate
/// nearly hidden modes when poles are tightly clustered; this can.
Realization balanced_truncation(const Realization& r, double tol = 1e-12);

/// right_to_left requires the observability Gramian ratio to exceed this.
inline constexpr double kObservabilityGramianTol = 1e-13;

// --- integrals and factorizations --------------------------------------------

/// Integral of W W* over the unit circle: C Pi C* + D D*, Pi = A Pi A* + B B*.
HermitianMatrix lyapunov_integral(const Realization& w);

/// Causal part Z of Phi = W W* for a stable left factor W.
CausalPart causal_part(const Realization& w);
CausalPart causal_part(const SpectralFactor& w);

/// Minimum phase left factor of Phi = Z + Z* from the stabilizing solution of
/// the positive-real Riccati equation.
SpectralFactor min_phase_factor(const CausalPart& z);

/// Realization of F^{-1}(z) for square F with invertible D.
Realization invert_realization(const Realization& f);

/// H1 with H* H = H1 H1* from a right factor H (observable realization).
SpectralFactor right_to_left(const SpectralFactor& h);
/// W1 with W1* W1 = W W* from a left factor W (controllable realization).
SpectralFactor left_to_right(const SpectralFactor& w);

/// F(z) = S(z) + T*(z) with S causal and T strictly causal (T.D = 0).
struct TwoSided {
  Realization causal;
  Realization anticausal;
};

/// Integral of F1 F2* over the unit circle: C1 X C2* + D1 D2*, X = A1 X A2* + B1 B2*.
Matrix cross_integral(const Realization& f1, const Realization& f2);
/// Integral of U V* for two-sided functions.
Matrix cross_integral(const TwoSided& u, const TwoSided& v);

/// F1 F2* split into causal and strictly anticausal parts.
TwoSided split_product(const Realization& f1, const Realization& f2);
/// F1* F2 split into causal and strictly anticausal parts.
TwoSided split_adjoint_product(const Realization& f1, const Realization& f2);
/// F(z) T(z) for causal F.
TwoSided left_multiply(const Realization& f, const TwoSided& t);
/// Pointwise transpose.
TwoSided transpose(const TwoSided& t);
Matrix evaluate(const TwoSided& t, double theta);

/// Factorization of Q_Lambda(z) = I + G*(z) Lambda G(z), G = (zI - A)^{-1} B.
struct QFactorization {
  HermitianMatrix P;      // stabilizing Riccati solution
  Realization Delta;      // Q = Delta* Delta, minimum phase
  Realization DeltaInv;   // Delta^{-1}
  Matrix closed_loop;     // A - B (B*PB + I)^{-1} B*PA
  Matrix n_inv;           // (B*PB + I)^{-1/2}
};

QFactorization factorize_Q(const Matrix& a, const Matrix& b, const HermitianMatrix& lambda);
QFactorization factorize_Q(const Realization& g, const HermitianMatrix& lambda);

/// G(z) Delta^{-1}(z) as a single n-state realization (A_cl, B N^{-1}, I, 0).
Realization filter_times_delta_inv(const QFactorization& q, const Matrix& b);

/// Phi(theta) = W W* evaluated on every node of the grid.
std::vector<Matrix> sample_left_spectrum(const Realization& w, const FrequencyGrid& grid);

}  // namespace hellinger
