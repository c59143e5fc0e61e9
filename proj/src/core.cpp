#include "hellinger/core.hpp"

#include <cmath>
#include <limits>

namespace hellinger {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::NotStable: return "NotStable";
    case ErrorKind::NoStabilizingSolution: return "NoStabilizingSolution";
    case ErrorKind::NotPSD: return "NotPSD";
    case ErrorKind::NotPD: return "NotPD";
    case ErrorKind::EmptyBasis: return "EmptyBasis";
    case ErrorKind::SingularResolvent: return "SingularResolvent";
    case ErrorKind::NotCoercive: return "NotCoercive";
    case ErrorKind::SingularD: return "SingularD";
    case ErrorKind::SingularObservabilityGramian: return "SingularObservabilityGramian";
    case ErrorKind::NotInDomain: return "NotInDomain";
    case ErrorKind::DegenerateHessian: return "DegenerateHessian";
    case ErrorKind::StepTooSmall: return "StepTooSmall";
    case ErrorKind::MaxIterations: return "MaxIterations";
    case ErrorKind::DuplicatePole: return "DuplicatePole";
    case ErrorKind::PoleOutsideDisk: return "PoleOutsideDisk";
    case ErrorKind::TooFewSamples: return "TooFewSamples";
    case ErrorKind::ProjectionNotPD: return "ProjectionNotPD";
    case ErrorKind::DegenerateSamples: return "DegenerateSamples";
    case ErrorKind::SingularToeplitz: return "SingularToeplitz";
    case ErrorKind::Infeasible: return "Infeasible";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

HermitianMatrix::HermitianMatrix(const Matrix& m) {
  if (m.rows() != m.cols()) {
    throw Error(ErrorKind::DimensionMismatch, "Hermitian matrix must be square");
  }
  m_ = 0.5 * (m + m.adjoint());
}

HermitianMatrix HermitianMatrix::operator+(const HermitianMatrix& o) const {
  return HermitianMatrix(m_ + o.m_);
}
HermitianMatrix HermitianMatrix::operator-(const HermitianMatrix& o) const {
  return HermitianMatrix(m_ - o.m_);
}
HermitianMatrix HermitianMatrix::operator*(double s) const { return HermitianMatrix(m_ * s); }

double inner(const Matrix& a, const Matrix& b) {
  return (a.array() * b.array().conjugate()).sum().real();
}

HermitianMatrix symmetrize(const Matrix& m) { return HermitianMatrix(m); }

double spectral_radius(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  Eigen::ComplexEigenSolver<Matrix> es(a, false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

bool is_stable(const Matrix& a, double margin) { return spectral_radius(a) < 1.0 - margin; }

double min_eigenvalue(const HermitianMatrix& m) {
  if (m.dim() == 0) return std::numeric_limits<double>::infinity();
  Eigen::SelfAdjointEigenSolver<Matrix> es(m.matrix(), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

double max_eigenvalue(const HermitianMatrix& m) {
  if (m.dim() == 0) return -std::numeric_limits<double>::infinity();
  Eigen::SelfAdjointEigenSolver<Matrix> es(m.matrix(), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(m.dim() - 1);
}

HermitianMatrix hermitian_sqrt(const HermitianMatrix& m) {
  if (m.dim() == 0) return m;
  Eigen::SelfAdjointEigenSolver<Matrix> es(m.matrix());
  const RealVector& ev = es.eigenvalues();
  const double scale = std::max(ev.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
  if (ev(0) < -1e-8 * scale) {
    throw Error(ErrorKind::NotPSD, "hermitian_sqrt: min eigenvalue " + std::to_string(ev(0)));
  }
  RealVector s = ev.cwiseMax(0.0).cwiseSqrt();
  return HermitianMatrix(es.eigenvectors() * s.asDiagonal() * es.eigenvectors().adjoint());
}

HermitianMatrix hermitian_inv_sqrt(const HermitianMatrix& m) {
  if (m.dim() == 0) return m;
  Eigen::SelfAdjointEigenSolver<Matrix> es(m.matrix());
  const RealVector& ev = es.eigenvalues();
  if (!(ev(0) > 0.0)) {
    throw Error(ErrorKind::NotPD, "hermitian_inv_sqrt: min eigenvalue " + std::to_string(ev(0)));
  }
  RealVector s = ev.cwiseSqrt().cwiseInverse();
  return HermitianMatrix(es.eigenvectors() * s.asDiagonal() * es.eigenvectors().adjoint());
}

Matrix solve_stein(const Matrix& a1, const Matrix& a2, const Matrix& q) {
  const Eigen::Index n1 = a1.rows();
  const Eigen::Index n2 = a2.rows();
  if (a1.cols() != n1 || a2.cols() != n2 || q.rows() != n1 || q.cols() != n2) {
    throw Error(ErrorKind::DimensionMismatch, "solve_stein");
  }
  if (n1 == 0 || n2 == 0) return Matrix::Zero(n1, n2);

  Eigen::ComplexSchur<Matrix> s1(a1);
  Eigen::ComplexSchur<Matrix> s2(a2);
  const Matrix& t1 = s1.matrixT();
  const Matrix& t2 = s2.matrixT();
  const Matrix& u1 = s1.matrixU();
  const Matrix& u2 = s2.matrixU();
  for (Eigen::Index i = 0; i < n1; ++i) {
    for (Eigen::Index j = 0; j < n2; ++j) {
      if (std::abs(1.0 - t1(i, i) * std::conj(t2(j, j))) < 1e-13) {
        throw Error(ErrorKind::SingularResolvent, "solve_stein: eigenvalue product on the unit circle");
      }
    }
  }

  Matrix qt = u1.adjoint() * q * u2;
  Matrix x = Matrix::Zero(n1, n2);
  Matrix lhs(n1, n1);
  CVector acc(n1);
  for (Eigen::Index j = n2 - 1; j >= 0; --j) {
    acc.setZero();
    for (Eigen::Index k = j + 1; k < n2; ++k) acc += std::conj(t2(j, k)) * x.col(k);
    CVector rhs = qt.col(j) + t1 * acc;
    lhs = -std::conj(t2(j, j)) * t1;
    lhs.diagonal().array() += 1.0;
    x.col(j) = lhs.triangularView<Eigen::Upper>().solve(rhs);
  }
  return u1 * x * u2.adjoint();
}

HermitianMatrix solve_discrete_lyapunov(const Matrix& a, const HermitianMatrix& q) {
  if (a.rows() != a.cols() || a.rows() != q.dim()) {
    throw Error(ErrorKind::DimensionMismatch, "solve_discrete_lyapunov");
  }
  if (!is_stable(a)) {
    throw Error(ErrorKind::NotStable,
                "solve_discrete_lyapunov: spectral radius " + std::to_string(spectral_radius(a)));
  }
  return HermitianMatrix(solve_stein(a, a, q.matrix()));
}

namespace {

bool all_finite(const Matrix& m) { return m.allFinite(); }

struct RiccatiEval {
  Matrix gain;
  Matrix closed_loop;
  Matrix residual;
  bool ok = false;
};

RiccatiEval riccati_eval(const Matrix& F, const Matrix& B, const Matrix& Q, const Matrix& R,
                         const Matrix& S, const Matrix& X) {
  RiccatiEval ev;
  Matrix rr = R + B.adjoint() * X * B;
  Eigen::PartialPivLU<Matrix> lu(rr);
  if (rr.size() > 0 && !(std::abs(lu.determinant()) > 0.0)) return ev;
  Matrix cross = B.adjoint() * X * F + S.adjoint();
  ev.gain = rr.size() > 0 ? Matrix(lu.solve(cross)) : Matrix::Zero(B.cols(), F.cols());
  ev.closed_loop = F - B * ev.gain;
  ev.residual = F.adjoint() * X * F - cross.adjoint() * ev.gain + Q - X;
  ev.residual = 0.5 * (ev.residual + ev.residual.adjoint()).eval();
  ev.ok = all_finite(ev.residual) && all_finite(ev.gain);
  return ev;
}

// Structure-preserving doubling on the S-free equation. Returns false on breakdown.
bool doubling(const Matrix& F, const Matrix& G0, const Matrix& H0, int max_iter, Matrix& X) {
  const Eigen::Index n = F.rows();
  Matrix a = F;
  Matrix g = G0;
  Matrix h = H0;
  const Matrix eye = Matrix::Identity(n, n);
  for (int it = 0; it < max_iter; ++it) {
    Matrix w = eye + g * h;
    Eigen::PartialPivLU<Matrix> lu(w);
    const double rc = lu.rcond();
    if (!(rc > 1e-14)) return false;
    Matrix wa = lu.solve(a);
    Matrix wg = lu.solve(g);
    Matrix a_next = a * wa;
    Matrix g_next = g + a * wg * a.adjoint();
    Matrix h_next = h + a.adjoint() * h * wa;
    g_next = 0.5 * (g_next + g_next.adjoint()).eval();
    h_next = 0.5 * (h_next + h_next.adjoint()).eval();
    if (!all_finite(h_next) || !all_finite(a_next) || !all_finite(g_next)) return false;
    const double dh = (h_next - h).norm();
    a = std::move(a_next);
    g = std::move(g_next);
    h = std::move(h_next);
    if (dh <= 1e-15 * std::max(1.0, h.norm()) || a.norm() < 1e-300) {
      X = h;
      return true;
    }
  }
  X = h;
  return (a.norm() < 1e-8);
}

bool polish_and_verify(const Matrix& F, const Matrix& B, const Matrix& Q, const Matrix& R,
                       const Matrix& S, Matrix& X, const DareOptions& opts,
                       DareSolution& out) {
  RiccatiEval ev = riccati_eval(F, B, Q, R, S, X);
  if (!ev.ok) return false;
  double res = ev.residual.norm();
  for (int k = 0; k < 4; ++k) {
    if (res <= 1e-15 * std::max(1.0, X.norm())) break;
    if (!is_stable(ev.closed_loop)) break;
    Matrix acl_h = ev.closed_loop.adjoint();
    Matrix e = solve_stein(acl_h, acl_h, ev.residual);
    Matrix x_new = X + e;
    x_new = 0.5 * (x_new + x_new.adjoint()).eval();
    RiccatiEval ev_new = riccati_eval(F, B, Q, R, S, x_new);
    if (!ev_new.ok) break;
    const double res_new = ev_new.residual.norm();
    if (!(res_new < res)) break;
    X = std::move(x_new);
    ev = std::move(ev_new);
    res = res_new;
  }
  if (!is_stable(ev.closed_loop)) return false;
  if (!(res <= opts.residual_tol * std::max(1.0, X.norm()))) return false;
  out.X = HermitianMatrix(X);
  out.closed_loop = ev.closed_loop;
  out.gain = ev.gain;
  out.residual = res;
  return true;
}

}  // namespace

DareSolution solve_dare_general(const Matrix& F, const Matrix& B, const HermitianMatrix& Q,
                                const HermitianMatrix& R, const Matrix& S,
                                const DareOptions& opts) {
  const Eigen::Index n = F.rows();
  const Eigen::Index m = B.cols();
  if (F.cols() != n || B.rows() != n || Q.dim() != n || R.dim() != m || S.rows() != n ||
      S.cols() != m) {
    throw Error(ErrorKind::DimensionMismatch, "solve_dare_general");
  }
  DareSolution out;
  if (n == 0) {
    out.X = HermitianMatrix::zero(0);
    out.closed_loop = Matrix::Zero(0, 0);
    out.gain = Matrix::Zero(m, 0);
    return out;
  }
  Eigen::PartialPivLU<Matrix> rlu(R.matrix());
  if (m > 0 && !(rlu.rcond() > 1e-14)) {
    throw Error(ErrorKind::NoStabilizingSolution, "R is singular");
  }
  const Matrix rinv_st = m > 0 ? Matrix(rlu.solve(S.adjoint())) : Matrix::Zero(0, n);
  const Matrix rinv_bt = m > 0 ? Matrix(rlu.solve(B.adjoint())) : Matrix::Zero(0, n);
  const Matrix f_tilde = F - B * rinv_st;
  const Matrix q_tilde = Q.matrix() - S * rinv_st;
  const Matrix g0 = B * rinv_bt;

  Matrix X;
  if (doubling(f_tilde, 0.5 * (g0 + g0.adjoint()), 0.5 * (q_tilde + q_tilde.adjoint()),
               opts.max_doubling, X)) {
    if (polish_and_verify(F, B, Q.matrix(), R.matrix(), S, X, opts, out)) return out;
  }

  // Damped fixed-point fallback of the Riccati map.
  X = Matrix::Zero(n, n);
  const double omega = 0.5;
  for (int it = 0; it < opts.max_fixed_point; ++it) {
    RiccatiEval ev = riccati_eval(F, B, Q.matrix(), R.matrix(), S, X);
    if (!ev.ok) break;
    Matrix x_new = X + omega * ev.residual;
    if (!all_finite(x_new) || x_new.norm() > 1e12) break;
    const double step = (x_new - X).norm();
    X = std::move(x_new);
    if (step <= 1e-13 * std::max(1.0, X.norm())) {
      if (polish_and_verify(F, B, Q.matrix(), R.matrix(), S, X, opts, out)) return out;
      break;
    }
  }
  throw Error(ErrorKind::NoStabilizingSolution, "Riccati equation has no verified stabilizing solution");
}

HermitianMatrix solve_dare_stabilizing(const Matrix& a, const Matrix& b,
                                       const HermitianMatrix& lambda) {
  const Eigen::Index m = b.cols();
  DareOptions opts;
  opts.max_fixed_point = 500;
  HermitianMatrix p = solve_dare_general(a, b, lambda, HermitianMatrix::identity(m),
                                         Matrix::Zero(a.rows(), m), opts)
                          .X;
  // A stabilizing solution with B*PB + I indefinite factors Q with an
  // indefinite middle term: Q is not positive on the circle.
  if (!(min_eigenvalue(HermitianMatrix(b.adjoint() * p.matrix() * b + Matrix::Identity(m, m))) > 0.0)) {
    throw Error(ErrorKind::NoStabilizingSolution, "Riccati solution has B*PB + I not positive definite");
  }
  return p;
}

Matrix dare_residual(const Matrix& a, const Matrix& b, const HermitianMatrix& lambda,
                     const Matrix& p) {
  const Eigen::Index m = b.cols();
  Matrix rr = Matrix::Identity(m, m) + b.adjoint() * p * b;
  Matrix bpa = b.adjoint() * p * a;
  return a.adjoint() * p * a - bpa.adjoint() * rr.lu().solve(bpa) + lambda.matrix() - p;
}

RealVector hermitian_to_real(const Matrix& m) {
  const Eigen::Index n = m.rows();
  RealVector v(n * n);
  Eigen::Index k = 0;
  const double r2 = std::sqrt(2.0);
  for (Eigen::Index i = 0; i < n; ++i) {
    v(k++) = m(i, i).real();
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const Complex z = 0.5 * (m(i, j) + std::conj(m(j, i)));
      v(k++) = r2 * z.real();
      v(k++) = r2 * z.imag();
    }
  }
  return v;
}

LeastSquaresSolution least_squares(const std::vector<HermitianMatrix>& columns,
                                   const HermitianMatrix& target) {
  if (columns.empty()) throw Error(ErrorKind::EmptyBasis, "least_squares: no columns");
  const Eigen::Index n = target.dim();
  RealMatrix sys(n * n, static_cast<Eigen::Index>(columns.size()));
  for (std::size_t k = 0; k < columns.size(); ++k) {
    if (columns[k].dim() != n) throw Error(ErrorKind::DimensionMismatch, "least_squares");
    sys.col(static_cast<Eigen::Index>(k)) = hermitian_to_real(columns[k].matrix());
  }
  const RealVector rhs = hermitian_to_real(target.matrix());
  Eigen::CompleteOrthogonalDecomposition<RealMatrix> cod;
  cod.setThreshold(1e-12);
  cod.compute(sys);
  LeastSquaresSolution sol;
  sol.coefficients = cod.solve(rhs);
  sol.rank = static_cast<int>(cod.rank());
  sol.residual_norm = (sys * sol.coefficients - rhs).norm();
  return sol;
}

}  // namespace hellinger
