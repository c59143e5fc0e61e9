#include "hellinger/newton.hpp"

#include <cmath>

namespace hellinger {

namespace {

SpectralFactor as_right(const Realization& r) { return {minimal_realization(r), FactorSide::Right}; }

/// Left factor of (W W*)^2 = W (W* W) W* = (W H1)(W H1)*.
Realization squared_spectrum_factor(const Realization& w) {
  Realization wm = minimal_realization(w);
  Realization h1 = right_to_left(as_right(wm)).realization;
  return minimal_realization(series(wm, h1));
}

/// integral of G Delta^{-1} (W W*) Delta^{-*} G*.
HermitianMatrix filtered_integral(const Realization& g_dinv, const Realization& w) {
  return lyapunov_integral(series(g_dinv, w));
}

/// Per-point quantities shared by the moment and the Hessian.
struct PointCalculus {
  Realization g_dinv;   // F = G Delta^{-1}
  Realization h_dinv;   // K = H_Psi Delta^{-1}, Phi_Psi = K* K
  HermitianMatrix moment;
};

PointCalculus point_calculus(const Problem& problem, const LambdaPoint& point, IntegralRoute route) {
  PointCalculus pc;
  pc.g_dinv = filter_times_delta_inv(point.qfact, problem.bank.B());
  pc.h_dinv = series(problem.prior.H_psi.realization, point.qfact.DeltaInv);
  if (route == IntegralRoute::CrossGramian) {
    const TwoSided fk = split_product(pc.g_dinv, pc.h_dinv);
    pc.moment = HermitianMatrix(cross_integral(fk, fk));
  } else {
    const Realization w1 = right_to_left(as_right(pc.h_dinv)).realization;
    pc.moment = filtered_integral(pc.g_dinv, w1);
  }
  return pc;
}

/// Y(S) = integral F [Phi_S Phi_Psi + Phi_Psi Phi_S] F* with Phi_S = F* S F.
class CrossTerm {
 public:
  virtual ~CrossTerm() = default;
  virtual HermitianMatrix operator()(const HermitianMatrix& s) const = 0;
};

/// Y(S) = X + X*, X = integral (F Phi_S)(F Phi_Psi)*, linear in S.
class CrossGramianTerm : public CrossTerm {
 public:
  explicit CrossGramianTerm(const PointCalculus& pc)
      : f_(pc.g_dinv), v_(left_multiply(pc.g_dinv, split_adjoint_product(pc.h_dinv, pc.h_dinv))) {}

  HermitianMatrix operator()(const HermitianMatrix& s) const override {
    const TwoSided u = left_multiply(f_, split_adjoint_product(f_, left_multiply(s.matrix(), f_)));
    const Matrix x = cross_integral(u, v_);
    return HermitianMatrix(x + x.adjoint());
  }

 private:
  Realization f_;
  TwoSided v_;
};

/// Polarization over (Phi_S + Phi_Psi)^2, Phi_Psi^2 and Phi_S^2; needs S > 0.
class PolarizedTerm : public CrossTerm {
 public:
  explicit PolarizedTerm(const PointCalculus& pc)
      : f_(pc.g_dinv),
        w1_(minimal_realization(right_to_left(as_right(pc.h_dinv)).realization)),
        z1_(causal_part(w1_)),
        psi_sq_(filtered_integral(f_, squared_spectrum_factor(w1_))) {}

  HermitianMatrix operator()(const HermitianMatrix& s) const override {
    const Realization h_s = left_multiply(hermitian_sqrt(s).matrix(), f_);
    const Realization w_s = minimal_realization(right_to_left(as_right(h_s)).realization);
    const HermitianMatrix s_sq = filtered_integral(f_, squared_spectrum_factor(w_s));

    const Realization z_sum =
        minimal_realization(parallel(causal_part(w_s).realization, z1_.realization));
    const Realization w_sum = min_phase_factor(CausalPart{z_sum}).realization;
    const HermitianMatrix sum_sq = filtered_integral(f_, squared_spectrum_factor(w_sum));
    return sum_sq - psi_sq_ - s_sq;
  }

 private:
  Realization f_;
  Realization w1_;
  CausalPart z1_;
  HermitianMatrix psi_sq_;
};

RealVector gradient_from_moment(const Problem& problem, const HermitianMatrix& moment) {
  const Eigen::Index n = moment.dim();
  return problem.basis.coordinates(Matrix::Identity(n, n) - moment.matrix());
}

}  // namespace

Prior Prior::from_left_factor(const Realization& w, int grid_check) {
  if (w.inputs() != w.outputs() || w.outputs() == 0) {
    throw Error(ErrorKind::DimensionMismatch, "prior factor must be square");
  }
  if (w.states() > 0 && !is_stable(w.A)) {
    throw Error(ErrorKind::NotStable, "prior factor is not stable");
  }
  const Realization wm = minimal_realization(w);
  const FrequencyGrid grid(grid_check);
  double lmin = std::numeric_limits<double>::infinity();
  for (double th : grid.thetas()) {
    const Matrix v = evaluate(wm, th);
    lmin = std::min(lmin, min_eigenvalue(HermitianMatrix(v * v.adjoint())));
  }
  if (!(lmin > 0.0)) throw Error(ErrorKind::NotCoercive, "prior spectrum is not coercive");
  Prior p;
  p.W_psi = SpectralFactor{wm, FactorSide::Left};
  p.H_psi = left_to_right(p.W_psi);
  return p;
}

Prior Prior::constant(const HermitianMatrix& psi) {
  if (!(min_eigenvalue(psi) > 0.0)) throw Error(ErrorKind::NotCoercive, "constant prior not PD");
  const Matrix w = hermitian_sqrt(psi).matrix();
  Prior p;
  p.W_psi = SpectralFactor{Realization::constant(w), FactorSide::Left};
  p.H_psi = SpectralFactor{Realization::constant(w.adjoint()), FactorSide::Right};
  return p;
}

Problem Problem::create(FilterBank bank, Prior prior) {
  if (prior.dim() != bank.inputs()) {
    throw Error(ErrorKind::DimensionMismatch, "prior dimension differs from bank inputs");
  }
  Problem p;
  p.basis = build_gamma_basis(bank);
  p.bank = std::move(bank);
  p.prior = std::move(prior);
  return p;
}

LambdaPoint make_lambda_point(const Problem& problem, const RealVector& coords) {
  LambdaPoint pt;
  pt.coords = coords;
  pt.matrix = problem.basis.combine(coords);
  pt.qfact = factorize_Q(problem.bank.A(), problem.bank.B(), pt.matrix);
  return pt;
}

double eval_J(const Problem& problem, const LambdaPoint& point) {
  const Realization hd = series(problem.prior.H_psi.realization, point.qfact.DeltaInv);
  return lyapunov_integral(hd).trace() + point.matrix.trace();
}

HermitianMatrix eval_moment(const Problem& problem, const LambdaPoint& point,
                            IntegralRoute route) {
  return point_calculus(problem, point, route).moment;
}

RealVector eval_gradient(const Problem& problem, const LambdaPoint& point, IntegralRoute route) {
  return gradient_from_moment(problem, eval_moment(problem, point, route));
}

RealMatrix eval_hessian_matrix(const Problem& problem, const LambdaPoint& point,
                               IntegralRoute route) {
  const GammaBasis& basis = problem.basis;
  const int d = basis.dimension;
  const PointCalculus pc = point_calculus(problem, point, route);
  RealMatrix h(d, d);

  if (route == IntegralRoute::CrossGramian) {
    const CrossGramianTerm cross(pc);
    for (int k = 0; k < d; ++k) {
      const HermitianMatrix y = cross(basis.orthonormal[static_cast<std::size_t>(k)]);
      for (int l = 0; l < d; ++l) {
        h(l, k) = inner(y.matrix(), basis.orthonormal[static_cast<std::size_t>(l)].matrix());
      }
    }
    return h;
  }

  // Shift every direction by (lambda + 1) I so that it is positive definite.
  const PolarizedTerm cross(pc);
  const Eigen::Index n = problem.bank.states();
  double lowest = 0.0;
  for (const auto& e : basis.orthonormal) lowest = std::min(lowest, min_eigenvalue(e));
  const double shift = -lowest + 1.0;
  const HermitianMatrix eye = HermitianMatrix::identity(n);
  const HermitianMatrix y_identity = cross(eye);
  for (int k = 0; k < d; ++k) {
    const HermitianMatrix& e = basis.orthonormal[static_cast<std::size_t>(k)];
    const HermitianMatrix y = cross(e + eye * shift) - y_identity * shift;
    for (int l = 0; l < d; ++l) {
      h(l, k) = inner(y.matrix(), basis.orthonormal[static_cast<std::size_t>(l)].matrix());
    }
  }
  return h;
}

RealVector newton_step(const RealMatrix& hessian, const RealVector& gradient) {
  if (hessian.rows() != hessian.cols() || hessian.rows() != gradient.size()) {
    throw Error(ErrorKind::DimensionMismatch, "newton_step");
  }
  if (gradient.size() == 0) return gradient;
  const RealMatrix sym = 0.5 * (hessian + hessian.transpose());
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(sym, Eigen::EigenvaluesOnly);
  const double lmin = es.eigenvalues()(0);
  const double lmax = es.eigenvalues()(sym.rows() - 1);
  if (!(lmax > 0.0) || lmin < 1e-12 * lmax) {
    throw Error(ErrorKind::DegenerateHessian,
                "Hessian eigenvalues in [" + std::to_string(lmin) + ", " + std::to_string(lmax) + "]");
  }
  Eigen::CompleteOrthogonalDecomposition<RealMatrix> cod(hessian);
  return cod.solve(-gradient);
}

BacktrackResult backtrack(const Problem& problem, const LambdaPoint& point, double j_value,
                          const RealVector& gradient, const RealVector& step,
                          const SolverConfig& config) {
  const double slope = gradient.dot(step);
  if (!(slope < 0.0)) throw Error(ErrorKind::InvalidArgument, "backtrack: not a descent direction");
  BacktrackResult res;
  double t = 1.0;
  for (int k = 0;; ++k) {
    if (t < config.t_min) {
      throw Error(ErrorKind::StepTooSmall, "backtracking step fell below t_min");
    }
    try {
      LambdaPoint cand = make_lambda_point(problem, point.coords + t * step);
      double decrease;
      if (std::abs(t * slope) > kRoundoffDecrease * (1.0 + std::abs(j_value))) {
        decrease = eval_J(problem, cand) - j_value;
      } else {
        decrease = 0.5 * t * (gradient + eval_gradient(problem, cand)).dot(step);
      }
      if (std::isfinite(decrease) && decrease < config.alpha * t * slope) {
        res.t = t;
        res.backtracks = k;
        res.J = j_value + decrease;
        res.decrease = decrease;
        res.next = std::move(cand);
        return res;
      }
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::NotInDomain && e.kind() != ErrorKind::NotStable) throw;
    }
    t *= 0.5;
  }
}

SolveResult solve(const Problem& problem, const SolverConfig& config,
                  const std::optional<RealVector>& start) {
  if (!(config.alpha > 0.0 && config.alpha < 0.5)) {
    throw Error(ErrorKind::InvalidArgument, "alpha must lie in (0, 1/2)");
  }
  const Eigen::Index n = problem.bank.states();
  const FeasibilityResult feas =
      feasibility_check(problem.basis, HermitianMatrix::identity(n), config.feasibility_tol);
  if (!feas.feasible) {
    throw Error(ErrorKind::Infeasible,
                "identity is not in Range Gamma (residual " + std::to_string(feas.residual) + ")");
  }

  SolveResult out;
  const int d = problem.basis.dimension;
  LambdaPoint point = make_lambda_point(problem, start ? *start : RealVector::Zero(d));
  double j_value = eval_J(problem, point);
  double t_prev = 0.0;
  int bt_prev = 0;
  double dec_prev = 0.0;

  for (int iter = 0;; ++iter) {
    const HermitianMatrix moment = eval_moment(problem, point);
    const RealVector grad = gradient_from_moment(problem, moment);
    IterationRecord rec;
    rec.iter = iter;
    rec.J = j_value;
    rec.grad_norm = grad.norm();
    rec.t = t_prev;
    rec.backtracks = bt_prev;
    rec.decrease = dec_prev;
    rec.constraint_residual = (moment.matrix() - Matrix::Identity(n, n)).norm();
    out.trace.records.push_back(rec);

    if (rec.grad_norm < config.grad_tol) {
      out.lambda = std::move(point);
      return out;
    }
    if (iter >= config.max_iters) {
      throw SolverError(ErrorKind::MaxIterations, "Newton iteration limit reached", out.trace);
    }
    try {
      const RealVector step = newton_step(eval_hessian_matrix(problem, point), grad);
      BacktrackResult bt = backtrack(problem, point, j_value, grad, step, config);
      point = std::move(bt.next);
      j_value = bt.J;
      t_prev = bt.t;
      bt_prev = bt.backtracks;
      dec_prev = bt.decrease;
    } catch (const Error& e) {
      throw SolverError(e.kind(), e.message(), out.trace);
    }
  }
}

SpectralFactor optimal_spectrum(const Problem& problem, const LambdaPoint& point) {
  const Realization h_dinv = series(problem.prior.H_psi.realization, point.qfact.DeltaInv);
  const Realization k = balanced_truncation(minimal_realization(h_dinv));
  const Realization w1 = right_to_left(SpectralFactor{k, FactorSide::Right}).realization;
  return SpectralFactor{minimal_realization(series(point.qfact.DeltaInv, w1)), FactorSide::Left};
}

double hellinger_distance(const std::vector<Matrix>& psi, const std::vector<Matrix>& phi) {
  if (psi.size() != phi.size() || psi.empty()) {
    throw Error(ErrorKind::DimensionMismatch, "hellinger_distance: grids differ");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < psi.size(); ++i) {
    const HermitianMatrix p(psi[i]);
    const HermitianMatrix f(phi[i]);
    if (!(min_eigenvalue(p) > 0.0) || !(min_eigenvalue(f) > 0.0)) {
      throw Error(ErrorKind::NotPD, "hellinger_distance: spectrum not PD at node " +
                                        std::to_string(i));
    }
    const Matrix fh = hermitian_sqrt(f).matrix();
    const HermitianMatrix mid(fh * p.matrix() * fh);
    acc += p.trace() + f.trace() - 2.0 * hermitian_sqrt(mid).trace();
  }
  return std::sqrt(std::max(0.0, acc / static_cast<double>(psi.size())));
}

}  // namespace hellinger
