#include "hellinger/realization.hpp"

#include <cmath>
#include <numbers>

namespace hellinger {

Realization::Realization(Matrix a, Matrix b, Matrix c, Matrix d)
    : A(std::move(a)), B(std::move(b)), C(std::move(c)), D(std::move(d)) {
  const Eigen::Index n = A.rows();
  if (A.cols() != n || B.rows() != n || C.cols() != n || C.rows() != D.rows() ||
      B.cols() != D.cols()) {
    throw Error(ErrorKind::DimensionMismatch, "Realization: inconsistent block sizes");
  }
}

Realization Realization::constant(const Matrix& d) {
  return Realization(Matrix::Zero(0, 0), Matrix::Zero(0, d.cols()), Matrix::Zero(d.rows(), 0),
                     d);
}

Realization Realization::filter(const Matrix& a, const Matrix& b) {
  const Eigen::Index n = a.rows();
  return Realization(a, b, Matrix::Identity(n, n), Matrix::Zero(n, b.cols()));
}

FrequencyGrid::FrequencyGrid(int count) {
  if (count <= 0) throw Error(ErrorKind::InvalidArgument, "grid size must be positive");
  thetas_.resize(static_cast<std::size_t>(count));
  const double step = 2.0 * std::numbers::pi / count;
  for (int k = 0; k < count; ++k) thetas_[static_cast<std::size_t>(k)] = -std::numbers::pi + step * k;
}

Matrix evaluate_at(const Realization& r, Complex z) {
  const Eigen::Index n = r.states();
  if (n == 0) return r.D;
  Matrix res = -r.A;
  res.diagonal().array() += z;
  Eigen::PartialPivLU<Matrix> lu(res);
  if (!(std::abs(lu.determinant()) > 0.0)) {
    throw Error(ErrorKind::SingularResolvent, "zI - A is singular");
  }
  return r.C * lu.solve(r.B) + r.D;
}

Matrix evaluate(const Realization& r, double theta) {
  return evaluate_at(r, std::polar(1.0, theta));
}

Realization series(const Realization& f1, const Realization& f2) {
  if (f1.inputs() != f2.outputs()) throw Error(ErrorKind::DimensionMismatch, "series");
  const Eigen::Index n1 = f1.states();
  const Eigen::Index n2 = f2.states();
  Matrix a = Matrix::Zero(n1 + n2, n1 + n2);
  a.topLeftCorner(n1, n1) = f1.A;
  a.topRightCorner(n1, n2) = f1.B * f2.C;
  a.bottomRightCorner(n2, n2) = f2.A;
  Matrix b(n1 + n2, f2.inputs());
  b.topRows(n1) = f1.B * f2.D;
  b.bottomRows(n2) = f2.B;
  Matrix c(f1.outputs(), n1 + n2);
  c.leftCols(n1) = f1.C;
  c.rightCols(n2) = f1.D * f2.C;
  return Realization(std::move(a), std::move(b), std::move(c), f1.D * f2.D);
}

Realization parallel(const Realization& f1, const Realization& f2) {
  if (f1.inputs() != f2.inputs() || f1.outputs() != f2.outputs()) {
    throw Error(ErrorKind::DimensionMismatch, "parallel");
  }
  const Eigen::Index n1 = f1.states();
  const Eigen::Index n2 = f2.states();
  Matrix a = Matrix::Zero(n1 + n2, n1 + n2);
  a.topLeftCorner(n1, n1) = f1.A;
  a.bottomRightCorner(n2, n2) = f2.A;
  Matrix b(n1 + n2, f1.inputs());
  b.topRows(n1) = f1.B;
  b.bottomRows(n2) = f2.B;
  Matrix c(f1.outputs(), n1 + n2);
  c.leftCols(n1) = f1.C;
  c.rightCols(n2) = f2.C;
  return Realization(std::move(a), std::move(b), std::move(c), f1.D + f2.D);
}

Realization left_multiply(const Matrix& k, const Realization& f) {
  return Realization(f.A, f.B, k * f.C, k * f.D);
}

Realization right_multiply(const Realization& f, const Matrix& k) {
  return Realization(f.A, f.B * k, f.C, f.D * k);
}

Realization transpose(const Realization& f) {
  return Realization(f.A.transpose(), f.C.transpose(), f.B.transpose(), f.D.transpose());
}

Realization controllable_part(const Realization& r, double tol) {
  const Eigen::Index n = r.states();
  if (n == 0) return r;
  Matrix a = r.A;
  Matrix b = r.B;
  Matrix c = r.C;
  const double a_ref = a.norm();
  // A B that is pure rounding noise must not look full rank.
  const double b_ref = std::max(b.norm(), a_ref);

  Eigen::Index k = 0;       // states already in the controllable staircase
  Eigen::Index k_prev = 0;  // column offset of the previous block
  Eigen::Index r_prev = 0;
  while (k < n) {
    const Eigen::Index rows = n - k;
    Matrix block = (k == 0) ? b : Matrix(a.block(k, k_prev, rows, r_prev));
    const double ref = (k == 0) ? b_ref : a_ref;
    if (block.size() == 0 || !(ref > 0.0)) break;
    Eigen::JacobiSVD<Matrix> svd(block, Eigen::ComputeFullU);
    const RealVector& s = svd.singularValues();
    Eigen::Index rank = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i) {
      if (s(i) > tol * ref) ++rank;
    }
    if (rank == 0) break;
    const Matrix& u = svd.matrixU();
    a.bottomRows(rows) = u.adjoint() * a.bottomRows(rows);
    a.rightCols(rows) = a.rightCols(rows) * u;
    b.bottomRows(rows) = u.adjoint() * b.bottomRows(rows);
    c.rightCols(rows) = c.rightCols(rows) * u;
    k_prev = k;
    r_prev = rank;
    k += rank;
  }
  return Realization(a.topLeftCorner(k, k), b.topRows(k), c.leftCols(k), r.D);
}

Realization observable_part(const Realization& r, double tol) {
  Realization dual(r.A.adjoint(), r.C.adjoint(), r.B.adjoint(), r.D.adjoint());
  Realization red = controllable_part(dual, tol);
  return Realization(red.A.adjoint(), red.C.adjoint(), red.B.adjoint(), r.D);
}

Realization minimal_realization(const Realization& r, double tol) {
  return observable_part(controllable_part(r, tol), tol);
}

HermitianMatrix lyapunov_integral(const Realization& w) {
  Matrix dd = w.D * w.D.adjoint();
  if (w.states() == 0) return HermitianMatrix(dd);
  HermitianMatrix pi = solve_discrete_lyapunov(w.A, HermitianMatrix(w.B * w.B.adjoint()));
  return HermitianMatrix(w.C * pi.matrix() * w.C.adjoint() + dd);
}

CausalPart causal_part(const Realization& w) {
  if (w.outputs() == 0) throw Error(ErrorKind::DimensionMismatch, "causal_part");
  Matrix dd = w.D * w.D.adjoint();
  if (w.states() == 0) return CausalPart{Realization::constant(0.5 * dd)};
  HermitianMatrix pi = solve_discrete_lyapunov(w.A, HermitianMatrix(w.B * w.B.adjoint()));
  Matrix g = w.A * pi.matrix() * w.C.adjoint() + w.B * w.D.adjoint();
  Matrix d0 = 0.5 * (w.C * pi.matrix() * w.C.adjoint() + dd);
  d0 = 0.5 * (d0 + d0.adjoint()).eval();
  return CausalPart{Realization(w.A, std::move(g), w.C, std::move(d0))};
}

CausalPart causal_part(const SpectralFactor& w) {
  if (w.side != FactorSide::Left) {
    throw Error(ErrorKind::InvalidArgument, "causal_part expects a left factor");
  }
  return causal_part(w.realization);
}

SpectralFactor min_phase_factor(const CausalPart& zpart) {
  const Realization& z = zpart.realization;
  const Eigen::Index n = z.states();
  const Eigen::Index m = z.outputs();
  if (z.inputs() != m) throw Error(ErrorKind::DimensionMismatch, "min_phase_factor: not square");
  const HermitianMatrix sigma(2.0 * z.D);
  if (!(min_eigenvalue(sigma) > 0.0)) {
    throw Error(ErrorKind::NotCoercive, "min_phase_factor: zeroth lag not positive definite");
  }
  if (n == 0) {
    return SpectralFactor{Realization::constant(hermitian_sqrt(sigma).matrix()), FactorSide::Left};
  }
  // Positive-real equation P = APA* + (G - APC*)(Sigma - CPC*)^{-1}(G - APC*)*
  // written in the generic form with F = A*, B = C*, R = -Sigma, S = -G.
  const DareSolution sol = solve_dare_general(z.A.adjoint(), z.C.adjoint(),
                                              HermitianMatrix::zero(n), sigma * -1.0, -z.B);
  const Matrix& p = sol.X.matrix();
  HermitianMatrix dd(sigma.matrix() - z.C * p * z.C.adjoint());
  if (!(min_eigenvalue(dd) > 1e-14 * sigma.norm())) {
    throw Error(ErrorKind::NotCoercive, "min_phase_factor: Sigma - CPC* not positive definite");
  }
  Matrix d = hermitian_sqrt(dd).matrix();
  Matrix b = (z.B - z.A * p * z.C.adjoint()) * hermitian_inv_sqrt(dd).matrix();
  return SpectralFactor{Realization(z.A, std::move(b), z.C, std::move(d)), FactorSide::Left};
}

Realization invert_realization(const Realization& f) {
  if (f.inputs() != f.outputs()) throw Error(ErrorKind::DimensionMismatch, "invert: not square");
  if (f.outputs() > 0) {
    Eigen::JacobiSVD<Matrix> svd(f.D);
    const RealVector& s = svd.singularValues();
    const double smin = s(s.size() - 1);
    if (!(smin > 0.0) || s(0) / smin > 1e12) {
      throw Error(ErrorKind::SingularD, "invert: D is singular or ill-conditioned");
    }
  }
  const Matrix dinv = f.D.inverse();
  return Realization(f.A - f.B * dinv * f.C, f.B * dinv, -dinv * f.C, dinv);
}

SpectralFactor right_to_left(const SpectralFactor& hf) {
  if (hf.side != FactorSide::Right) {
    throw Error(ErrorKind::InvalidArgument, "right_to_left expects a right factor");
  }
  const Realization& h = hf.realization;
  const Eigen::Index n = h.states();
  const Eigen::Index q = h.outputs();
  if (n == 0) {
    return SpectralFactor{Realization::constant(h.D.adjoint()), FactorSide::Left};
  }
  HermitianMatrix p = solve_discrete_lyapunov(h.A.adjoint(), HermitianMatrix(h.C.adjoint() * h.C));
  Eigen::SelfAdjointEigenSolver<Matrix> es(p.matrix());
  const RealVector& ev = es.eigenvalues();
  if (!(ev(0) >= kObservabilityGramianTol * ev(n - 1)) || !(ev(n - 1) > 0.0)) {
    throw Error(ErrorKind::SingularObservabilityGramian,
                "right_to_left: observability Gramian is singular");
  }
  const Matrix& v = es.eigenvectors();
  const Matrix p_half = v * ev.cwiseSqrt().asDiagonal() * v.adjoint();
  const Matrix p_inv_half = v * ev.cwiseSqrt().cwiseInverse().asDiagonal() * v.adjoint();

  // Orthonormal basis of ker [A* P^{1/2}, C*]: complement of the range of its adjoint.
  Matrix m_adj(n + q, n);
  m_adj.topRows(n) = p_half * h.A;
  m_adj.bottomRows(q) = h.C;
  Eigen::HouseholderQR<Matrix> qr(m_adj);
  Matrix qfull = qr.householderQ() * Matrix::Identity(n + q, n + q);
  Matrix ker = qfull.rightCols(q);
  Matrix k = ker.topRows(n);
  Matrix j = ker.bottomRows(q);
  Matrix g = p_inv_half * k;
  Matrix c1 = h.D.adjoint() * h.C + h.B.adjoint() * p.matrix() * h.A;
  Matrix d1 = h.B.adjoint() * p.matrix() * g + h.D.adjoint() * j;
  return SpectralFactor{Realization(h.A, std::move(g), std::move(c1), std::move(d1)),
                        FactorSide::Left};
}

SpectralFactor left_to_right(const SpectralFactor& wf) {
  if (wf.side != FactorSide::Left) {
    throw Error(ErrorKind::InvalidArgument, "left_to_right expects a left factor");
  }
  SpectralFactor h{transpose(wf.realization), FactorSide::Right};
  SpectralFactor h1 = right_to_left(h);
  return SpectralFactor{transpose(h1.realization), FactorSide::Right};
}

QFactorization factorize_Q(const Matrix& a, const Matrix& b, const HermitianMatrix& lambda) {
  const Eigen::Index n = a.rows();
  const Eigen::Index m = b.cols();
  if (a.cols() != n || b.rows() != n || lambda.dim() != n) {
    throw Error(ErrorKind::DimensionMismatch, "factorize_Q");
  }
  HermitianMatrix p;
  try {
    p = solve_dare_stabilizing(a, b, lambda);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::NoStabilizingSolution) {
      throw Error(ErrorKind::NotInDomain, "Q_Lambda admits no stabilizing factorization");
    }
    throw;
  }
  HermitianMatrix r(Matrix::Identity(m, m) + b.adjoint() * p.matrix() * b);
  if (!(min_eigenvalue(r) > 1e-12)) {
    throw Error(ErrorKind::NotInDomain, "B*PB + I is not positive definite");
  }
  QFactorization q;
  q.P = p;
  const Matrix n_half = hermitian_sqrt(r).matrix();
  q.n_inv = hermitian_inv_sqrt(r).matrix();
  const Matrix mm = q.n_inv * b.adjoint() * p.matrix() * a;
  q.closed_loop = a - b * q.n_inv * mm;
  q.Delta = Realization(a, b, mm, n_half);
  q.DeltaInv = Realization(q.closed_loop, b * q.n_inv, -q.n_inv * mm, q.n_inv);
  return q;
}

QFactorization factorize_Q(const Realization& g, const HermitianMatrix& lambda) {
  return factorize_Q(g.A, g.B, lambda);
}

Realization filter_times_delta_inv(const QFactorization& q, const Matrix& b) {
  const Eigen::Index n = q.closed_loop.rows();
  return Realization(q.closed_loop, b * q.n_inv, Matrix::Identity(n, n),
                     Matrix::Zero(n, b.cols()));
}

std::vector<Matrix> sample_left_spectrum(const Realization& w, const FrequencyGrid& grid) {
  std::vector<Matrix> out;
  out.reserve(static_cast<std::size_t>(grid.count()));
  for (double th : grid.thetas()) {
    Matrix v = evaluate(w, th);
    out.push_back(v * v.adjoint());
  }
  return out;
}

}  // namespace hellinger

namespace hellinger {

Matrix cross_integral(const Realization& f1, const Realization& f2) {
  if (f1.inputs() != f2.inputs()) throw Error(ErrorKind::DimensionMismatch, "cross_integral");
  Matrix out = f1.D * f2.D.adjoint();
  if (f1.states() == 0 || f2.states() == 0) return out;
  const Matrix x = solve_stein(f1.A, f2.A, f1.B * f2.B.adjoint());
  return out + f1.C * x * f2.C.adjoint();
}

Matrix cross_integral(const TwoSided& u, const TwoSided& v) {
  // Causal-times-anticausal cross terms vanish since the anticausal parts are strict.
  return cross_integral(u.causal, v.causal) +
         cross_integral(transpose(v.anticausal), transpose(u.anticausal)).transpose();
}

TwoSided split_product(const Realization& f1, const Realization& f2) {
  if (f1.inputs() != f2.inputs()) throw Error(ErrorKind::DimensionMismatch, "split_product");
  const Eigen::Index p = f1.outputs();
  const Eigen::Index q = f2.outputs();
  const Matrix x = solve_stein(f1.A, f2.A, f1.B * f2.B.adjoint());
  TwoSided t;
  t.causal = Realization(f1.A, f1.A * x * f2.C.adjoint() + f1.B * f2.D.adjoint(), f1.C,
                         f1.C * x * f2.C.adjoint() + f1.D * f2.D.adjoint());
  t.anticausal = Realization(f2.A, f2.A * x.adjoint() * f1.C.adjoint() + f2.B * f1.D.adjoint(),
                             f2.C, Matrix::Zero(q, p));
  return t;
}

TwoSided transpose(const TwoSided& t) {
  return TwoSided{transpose(t.causal), transpose(t.anticausal)};
}

TwoSided split_adjoint_product(const Realization& f1, const Realization& f2) {
  return transpose(split_product(transpose(f2), transpose(f1)));
}

TwoSided left_multiply(const Realization& f, const TwoSided& t) {
  TwoSided cross = split_product(f, t.anticausal);
  return TwoSided{parallel(series(f, t.causal), cross.causal), cross.anticausal};
}

Matrix evaluate(const TwoSided& t, double theta) {
  return evaluate(t.causal, theta) + evaluate(t.anticausal, theta).adjoint();
}

}  // namespace hellinger

namespace hellinger {

Realization balanced_truncation(const Realization& r, double tol) {
  const Eigen::Index n = r.states();
  if (n == 0) return r;
  if (!is_stable(r.A)) throw Error(ErrorKind::NotStable, "balanced_truncation");
  // Square-root method: P = Lp Lp*, Q = Lq Lq*, Lq* Lp = U S V*.
  const Matrix lp = hermitian_sqrt(solve_discrete_lyapunov(r.A, HermitianMatrix(r.B * r.B.adjoint()))).matrix();
  const Matrix lq =
      hermitian_sqrt(solve_discrete_lyapunov(r.A.adjoint(), HermitianMatrix(r.C.adjoint() * r.C))).matrix();
  Eigen::JacobiSVD<Matrix> svd(lq * lp, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const RealVector& s = svd.singularValues();
  Eigen::Index keep = 0;
  while (keep < n && s(keep) > tol * s(0)) ++keep;
  if (keep == 0) return Realization::constant(r.D);
  const RealVector s_inv_half = s.head(keep).cwiseSqrt().cwiseInverse();
  const Matrix t = lp * svd.matrixV().leftCols(keep) * s_inv_half.asDiagonal();
  const Matrix t_inv = s_inv_half.asDiagonal() * svd.matrixU().leftCols(keep).adjoint() * lq;
  return Realization(t_inv * r.A * t, t_inv * r.B, r.C * t, r.D);
}

}  // namespace hellinger
