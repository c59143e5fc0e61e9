#include "hellinger/gamma.hpp"

#include <numeric>

namespace hellinger {

Eigen::Index reachability_rank(const Matrix& a, const Matrix& b, double tol) {
  const Eigen::Index n = a.rows();
  if (n == 0) return 0;
  // Staircase reduction is better conditioned than the Krylov matrix.
  Realization r(a, b, Matrix::Zero(0, n), Matrix::Zero(0, b.cols()));
  return controllable_part(r, tol).states();
}

FilterBank::FilterBank(Matrix a, Matrix b) : a_(std::move(a)), b_(std::move(b)) {
  const Eigen::Index n = a_.rows();
  if (a_.cols() != n || b_.rows() != n || n == 0 || b_.cols() == 0) {
    throw Error(ErrorKind::DimensionMismatch, "FilterBank: A must be n x n and B n x m");
  }
  if (!is_stable(a_)) {
    throw Error(ErrorKind::NotStable, "FilterBank: A is not stable");
  }
  Eigen::FullPivLU<Matrix> lu(b_);
  lu.setThreshold(1e-12);
  if (lu.rank() != b_.cols()) {
    throw Error(ErrorKind::InvalidArgument, "FilterBank: B lacks full column rank");
  }
  if (reachability_rank(a_, b_) != n) {
    throw Error(ErrorKind::InvalidArgument, "FilterBank: (A, B) is not reachable");
  }
}

HermitianMatrix GammaBasis::combine(const RealVector& coords) const {
  if (coords.size() != dimension) throw Error(ErrorKind::DimensionMismatch, "combine");
  const Eigen::Index n = orthonormal.empty() ? 0 : orthonormal.front().dim();
  Matrix acc = Matrix::Zero(n, n);
  for (int k = 0; k < dimension; ++k) acc += coords(k) * orthonormal[static_cast<std::size_t>(k)].matrix();
  return HermitianMatrix(acc);
}

RealVector GammaBasis::coordinates(const Matrix& m) const {
  RealVector c(dimension);
  for (int k = 0; k < dimension; ++k) c(k) = inner(m, orthonormal[static_cast<std::size_t>(k)].matrix());
  return c;
}

HermitianMatrix gamma_apply(const FilterBank& g, const Realization& w) {
  return lyapunov_integral(series(g.realization(), w));
}

HermitianMatrix gamma_apply(const FilterBank& g, const SpectralFactor& phi_factor) {
  if (phi_factor.side != FactorSide::Left) {
    throw Error(ErrorKind::InvalidArgument, "gamma_apply expects a left factor");
  }
  return gamma_apply(g, phi_factor.realization);
}

GammaBasis build_gamma_basis(const FilterBank& g, const std::vector<int>& order) {
  const Eigen::Index n = g.states();
  const Eigen::Index m = g.inputs();
  const int count = static_cast<int>(2 * m * n);

  std::vector<int> idx(order);
  if (idx.empty()) {
    idx.resize(static_cast<std::size_t>(count));
    std::iota(idx.begin(), idx.end(), 0);
  }
  if (static_cast<int>(idx.size()) != count) {
    throw Error(ErrorKind::InvalidArgument, "build_gamma_basis: order must permute 2mn entries");
  }

  GammaBasis basis;
  for (int code : idx) {
    // code = 2*(i*n + j) + part: real or imaginary unit at (i, j).
    const int part = code % 2;
    const int pos = code / 2;
    Matrix h = Matrix::Zero(m, n);
    h(pos / n, pos % n) = part == 0 ? Complex(1.0, 0.0) : Complex(0.0, 1.0);
    HermitianMatrix rhs(g.B() * h + h.adjoint() * g.B().adjoint());
    HermitianMatrix sigma = solve_discrete_lyapunov(g.A(), rhs);
    basis.h_base.push_back(h);
    basis.generators.push_back(sigma);

    // Modified Gram-Schmidt, applied twice.
    Matrix v = sigma.matrix();
    const double norm0 = v.norm();
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& e : basis.orthonormal) v -= inner(v, e.matrix()) * e.matrix();
    }
    const double nv = v.norm();
    if (nv > kGramSchmidtDropTol * std::max(1.0, norm0)) {
      basis.orthonormal.emplace_back(v / nv);
    }
  }
  basis.dimension = static_cast<int>(basis.orthonormal.size());
  return basis;
}

HermitianMatrix project_onto_range(const GammaBasis& basis, const HermitianMatrix& m) {
  if (!basis.orthonormal.empty() && basis.orthonormal.front().dim() != m.dim()) {
    throw Error(ErrorKind::DimensionMismatch, "project_onto_range");
  }
  return basis.combine(basis.coordinates(m.matrix()));
}

FeasibilityResult feasibility_check(const GammaBasis& basis, const HermitianMatrix& sigma,
                                    double tol) {
  FeasibilityResult res;
  res.residual = (sigma - project_onto_range(basis, sigma)).norm();
  res.feasible = res.residual <= tol * (1.0 + sigma.norm());
  return res;
}

FilterBank normalize_to_identity(const FilterBank& g, const HermitianMatrix& sigma) {
  if (sigma.dim() != g.states()) throw Error(ErrorKind::DimensionMismatch, "normalize_to_identity");
  const double lmin = min_eigenvalue(sigma);
  if (!(lmin > kProjectionPDTol * sigma.norm())) {
    throw Error(ErrorKind::NotPD, "normalize_to_identity: Sigma is not positive definite");
  }
  const Matrix s_half = hermitian_sqrt(sigma).matrix();
  const Matrix s_inv_half = hermitian_inv_sqrt(sigma).matrix();
  return FilterBank(s_inv_half * g.A() * s_half, s_inv_half * g.B());
}

}  // namespace hellinger
