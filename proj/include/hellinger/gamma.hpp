#pragma once

#include <vector>

#include "hellinger/realization.hpp"

namespace hellinger {

/// G(z) = (zI - A)^{-1} B with A stable and (A, B) reachable.
class FilterBank {
 public:
  FilterBank() = default;
  /// Validates stability, full column rank of B and reachability.
  FilterBank(Matrix a, Matrix b);

  const Matrix& A() const noexcept { return a_; }
  const Matrix& B() const noexcept { return b_; }
  Eigen::Index states() const noexcept { return a_.rows(); }
  Eigen::Index inputs() const noexcept { return b_.cols(); }
  Realization realization() const { return Realization::filter(a_, b_); }

 private:
  Matrix a_;
  Matrix b_;
};

/// Rank of [B, AB, ..., A^{n-1}B] with relative tolerance.
Eigen::Index reachability_rank(const Matrix& a, const Matrix& b, double tol = 1e-9);

/// Spanning set of Range Gamma from the canonical real base of C^{m x n}.
struct GammaBasis {
  std::vector<Matrix> h_base;                 // H_k, m x n
  std::vector<HermitianMatrix> generators;    // Sigma_k - A Sigma_k A* = B H_k + H_k* B*
  std::vector<HermitianMatrix> orthonormal;   // Gram-Schmidt of generators
  int dimension = 0;

  /// Sum_k coords_k * orthonormal_k.
  HermitianMatrix combine(const RealVector& coords) const;
  /// <M, orthonormal_k> for every k.
  RealVector coordinates(const Matrix& m) const;
};

inline constexpr double kGramSchmidtDropTol = 1e-10;
inline constexpr double kFeasibilityTol = 1e-8;
/// Relative eigenvalue floor for a target covariance to count as positive definite.
inline constexpr double kProjectionPDTol = 1e-12;

/// Gamma(Phi) = integral of G Phi G* for Phi = W W*.
HermitianMatrix gamma_apply(const FilterBank& g, const SpectralFactor& phi_factor);
HermitianMatrix gamma_apply(const FilterBank& g, const Realization& w);

/// `order` permutes the canonical H base (identity when empty).
GammaBasis build_gamma_basis(const FilterBank& g, const std::vector<int>& order = {});

HermitianMatrix project_onto_range(const GammaBasis& basis, const HermitianMatrix& m);

struct FeasibilityResult {
  bool feasible = false;
  double residual = 0.0;
};

FeasibilityResult feasibility_check(const GammaBasis& basis, const HermitianMatrix& sigma,
                                    double tol = kFeasibilityTol);

/// Change of basis making the target covariance the identity.
FilterBank normalize_to_identity(const FilterBank& g, const HermitianMatrix& sigma);

}  // namespace hellinger
