#include "hellinger/estimation.hpp"

#include <numbers>

#include <gtest/gtest.h>

#include "support/oracles.hpp"

namespace hellinger {
namespace {

using testing::Rng;

constexpr double kPi = std::numbers::pi;

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no exception";
  return ErrorKind::Io;
}

TimeSeries white_noise(Eigen::Index n, Eigen::Index m, std::uint64_t seed) {
  Rng rng(seed);
  return TimeSeries(rng.matrix(n, m, true));
}

TEST(Banks, CovarianceExtensionIsAShiftRegister) {
  const FilterBank g = covariance_extension_bank(4);
  // G(z) = [z^-4, z^-3, z^-2, z^-1]^T.
  for (double th : {0.3, 1.7}) {
    const Matrix v = evaluate(g.realization(), th);
    for (int k = 0; k < 4; ++k) EXPECT_LT(std::abs(v(k, 0) - std::polar(1.0, -(4 - k) * th)), 1e-12);
  }
}

TEST(Banks, PoleBankValidation) {
  EXPECT_EQ(kind_of([] { pole_bank({Complex(1.0, 0.0)}); }), ErrorKind::PoleOutsideDisk);
  EXPECT_EQ(kind_of([] { pole_bank({Complex(0.5, 0.0), Complex(0.5, 0.0)}); }), ErrorKind::DuplicatePole);
  EXPECT_EQ(kind_of([] { pole_bank({std::polar(0.9, 0.4)}, true); }), ErrorKind::InvalidArgument);
  EXPECT_EQ(kind_of([] { pole_bank({}); }), ErrorKind::InvalidArgument);
}

TEST(Banks, RealStructuredBankIsReal) {
  const FilterBank g = pole_bank({Complex(0.3, 0.0), std::polar(0.9, 0.4), std::polar(0.9, -0.4)}, true);
  EXPECT_EQ(g.A().imag().norm(), 0.0);
  EXPECT_EQ(g.B().imag().norm(), 0.0);
  // Same poles as the diagonal bank.
  Eigen::ComplexEigenSolver<Matrix> es(g.A());
  std::vector<double> angles;
  for (Eigen::Index k = 0; k < 3; ++k) angles.push_back(std::arg(es.eigenvalues()(k)));
  std::sort(angles.begin(), angles.end());
  EXPECT_NEAR(angles[0], -0.4, 1e-12);
  EXPECT_NEAR(angles[2], 0.4, 1e-12);
}

TEST(Banks, SinusoidBank) {
  const std::vector<Complex> poles = sinusoid_bank_poles();
  ASSERT_EQ(poles.size(), 13u);
  const FilterBank g = sinusoid_bank();
  EXPECT_EQ(g.states(), 13);
  EXPECT_EQ(build_gamma_basis(g).dimension, 25);
  int pairs = 0;
  for (const Complex& p : poles) {
    if (p.imag() > 0.0) {
      EXPECT_NEAR(std::abs(p), 0.9, 1e-15);
      ++pairs;
    }
  }
  EXPECT_EQ(pairs, 5);
}

TEST(Banks, BivariateBank) {
  const FilterBank g = bivariate_bank();
  EXPECT_EQ(g.states(), 9);
  EXPECT_EQ(g.inputs(), 2);
  EXPECT_EQ(build_gamma_basis(g).dimension, 32);
}

TEST(Covariance, DefaultBurnIn) {
  EXPECT_EQ(default_burn_in(13, 300), 130);
  EXPECT_EQ(default_burn_in(6, 500), 100);
  EXPECT_EQ(default_burn_in(9, 100), 10);
  EXPECT_EQ(default_burn_in(20, 100), 0);
}

TEST(Covariance, ShiftRegisterGivesLaggedProducts) {
  const TimeSeries y = white_noise(200, 1, 61);
  const int n = 3, burn = 10;
  const HermitianMatrix s = filter_covariance(covariance_extension_bank(n), y, burn);
  // State after sample t is [y_{t-2}, y_{t-1}, y_t].
  Matrix ref = Matrix::Zero(n, n);
  for (int t = burn; t < 200; ++t) {
    CVector x(n);
    for (int k = 0; k < n; ++k) {
      const int idx = t - (n - 1 - k);
      x(k) = idx >= 0 ? y.values(idx, 0) : Complex(0.0, 0.0);
    }
    ref += x * x.adjoint();
  }
  EXPECT_LT((s.matrix() - ref / (200.0 - burn)).norm(), 1e-12);
}

TEST(Covariance, Errors) {
  const TimeSeries y = white_noise(50, 1, 62);
  EXPECT_EQ(kind_of([&] { filter_covariance(covariance_extension_bank(6), y, 0); }), ErrorKind::TooFewSamples);
  EXPECT_EQ(kind_of([&] { filter_covariance(bivariate_bank(), y, 0); }), ErrorKind::DimensionMismatch);
  EXPECT_EQ(kind_of([&] { TimeSeries(Matrix::Constant(3, 1, Complex(std::nan(""), 0.0))); }),
            ErrorKind::InvalidArgument);
}

TEST(Covariance, ProjectionKeepsRangeElements) {
  Rng rng(63);
  const FilterBank g = covariance_extension_bank(4);
  const GammaBasis basis = build_gamma_basis(g);
  const HermitianMatrix sigma = gamma_apply(g, rng.coercive_factor(2, 1));
  EXPECT_LT((prepare_sigma(basis, sigma) - sigma).norm(), 1e-10);
  EXPECT_EQ(kind_of([&] { prepare_sigma(basis, sigma * -1.0); }), ErrorKind::ProjectionNotPD);
}

TEST(Priors, SampleCovariance) {
  const TimeSeries y = white_noise(40, 2, 64);
  Matrix ref = Matrix::Zero(2, 2);
  for (Eigen::Index t = 0; t < 40; ++t) ref += y.values.row(t).transpose() * y.values.row(t).conjugate();
  EXPECT_LT((sample_covariance(y).matrix() - ref / 39.0).norm(), 1e-12);
  EXPECT_EQ(kind_of([] { constant_prior(TimeSeries(Matrix::Zero(10, 1))); }), ErrorKind::DegenerateSamples);
}

TEST(Priors, RationalFilterMatchesPolynomialRatio) {
  CVector num(3), den(4);
  num << 1.0, 0.5, -0.2;
  den << 1.0, -0.3, 0.2, 0.1;
  const Realization r = rational_filter(num, den);
  for (double th : {0.0, 0.7, -2.2}) {
    const Complex zi = std::polar(1.0, -th);
    Complex n = 0.0, d = 0.0;
    for (Eigen::Index k = 0; k < num.size(); ++k) n += num(k) * std::pow(zi, static_cast<double>(k));
    for (Eigen::Index k = 0; k < den.size(); ++k) d += den(k) * std::pow(zi, static_cast<double>(k));
    EXPECT_LT(std::abs(evaluate(r, th)(0, 0) - n / d), 1e-12);
  }
  EXPECT_THROW(rational_filter(num, CVector::Constant(2, 2.0)), Error);
}

TEST(Priors, YuleWalkerRecoversAnArProcess) {
  // y_t = 1.2 y_{t-1} - 0.5 y_{t-2} + 0.7 e_t.
  CVector a(2);
  a << -1.2, 0.5;
  const ArModel truth{a, 0.7};
  const TimeSeries y = simulate_realization(truth.factor(), 20000, 65);
  const ArModel fit = fit_yule_walker(y, 2);
  EXPECT_LT((fit.a - a).norm(), 0.03);
  EXPECT_NEAR(fit.sigma_e, 0.7, 0.02);
  // z^2 a(z) = z^2 + a_1 z + a_2.
  const CVector roots = testing::companion_roots((CVector(3) << fit.a(1), fit.a(0), 1.0).finished());
  for (Eigen::Index k = 0; k < roots.size(); ++k) EXPECT_LT(std::abs(roots(k)), 1.0);
}

TEST(Priors, YuleWalkerOrderZeroIsConstant) {
  const TimeSeries y = white_noise(100, 1, 66);
  const Prior p = yule_walker_prior(y, 0);
  EXPECT_EQ(p.W_psi.realization.states(), 0);
  EXPECT_EQ(kind_of([] { fit_yule_walker(TimeSeries(Matrix::Zero(20, 1)), 2); }), ErrorKind::SingularToeplitz);
  EXPECT_EQ(kind_of([] { fit_yule_walker(TimeSeries(Matrix::Zero(20, 2)), 2); }), ErrorKind::DimensionMismatch);
}

TEST(Scenarios, ArmaFactorMatchesPolynomials) {
  const RealVector ar = arma_ar_coefficients();
  const RealVector ma = arma_ma_coefficients();
  const Realization w = arma_true_factor();
  for (double th : {0.1, 1.0, 2.5}) {
    const Complex zi = std::polar(1.0, -th);
    Complex n = 0.0, d = 0.0;
    for (Eigen::Index k = 0; k < ma.size(); ++k) n += ma(k) * std::pow(zi, static_cast<double>(k));
    for (Eigen::Index k = 0; k < ar.size(); ++k) d += ar(k) * std::pow(zi, static_cast<double>(k));
    EXPECT_LT(std::abs(evaluate(w, th)(0, 0) - n / d), 1e-10);
  }
  // Poles are the companion roots of z^5 a(z).
  CVector rev(6);
  for (int k = 0; k < 6; ++k) rev(k) = ar(5 - k);
  const CVector roots = testing::companion_roots(rev);
  for (Eigen::Index k = 0; k < roots.size(); ++k) EXPECT_LT(std::abs(roots(k)), 1.0);
  EXPECT_TRUE(is_stable(w.A));
  // The printed last coefficient is rounded, so the listed poles hold to 1e-3 only.
  for (const Complex pole : {Complex(0.9, 0.0), Complex(-0.2, 0.7), Complex(-0.2, -0.7), Complex(0.0, 0.5),
                             Complex(0.0, -0.5)}) {
    double nearest = 1.0;
    for (Eigen::Index k = 0; k < roots.size(); ++k) nearest = std::min(nearest, std::abs(roots(k) - pole));
    EXPECT_LT(nearest, 1e-3) << pole;
  }
}

TEST(Scenarios, SeededAndSized) {
  const Scenario a1 = generate_arma_example(500, 1);
  const Scenario a2 = generate_arma_example(500, 1);
  const Scenario a3 = generate_arma_example(500, 2);
  EXPECT_EQ(a1.data.size(), 500);
  EXPECT_EQ(a1.data.values, a2.data.values);
  EXPECT_NE(a1.data.values, a3.data.values);
  const Scenario s = generate_sinusoids_example(300, 3);
  EXPECT_EQ(s.data.size(), 300);
  ASSERT_EQ(s.line_angles.size(), 2u);
  EXPECT_DOUBLE_EQ(s.line_angles[0], kOmega1);
  EXPECT_DOUBLE_EQ(s.line_angles[1], kOmega2);
  const Scenario b = generate_bivariate_example(100, 4);
  EXPECT_EQ(b.data.size(), 100);
  EXPECT_EQ(b.data.dim(), 2);
  EXPECT_EQ(b.data.values.imag().norm(), 0.0);
}

TEST(Scenarios, SinusoidLinesCarryTheirPower) {
  SinusoidOptions lines_only;
  lines_only.include_noise = false;
  const Scenario s = generate_sinusoids_example(20000, 5, lines_only);
  // Two sinusoids of amplitude 0.5: total power 0.25.
  EXPECT_NEAR(sample_covariance(s.data).trace(), 0.25, 0.01);
}

TEST(Scenarios, SimulatedCovarianceMatchesIntegral) {
  Rng rng(67);
  const Realization w = rng.coercive_factor(3, 2, 0.6);
  const Realization wr(w.A.real().cast<Complex>(), w.B.real().cast<Complex>(), w.C.real().cast<Complex>(),
                       w.D.real().cast<Complex>());
  const TimeSeries y = simulate_realization(wr, 50000, 68);
  EXPECT_LT(testing::relative_error(sample_covariance(y).matrix(), lyapunov_integral(wr).matrix()), 0.05);
}

TEST(Scenarios, BivariateShapingFilter) {
  const Realization w = bivariate_shaping_filter();
  EXPECT_EQ(w.states(), 40);
  EXPECT_EQ(w.inputs(), 2);
  EXPECT_TRUE(is_stable(w.A));
  const CVector eig = Eigen::ComplexEigenSolver<Matrix>(w.A, false).eigenvalues();
  double best = 1.0;
  for (Eigen::Index k = 0; k < eig.size(); ++k) best = std::min(best, std::abs(eig(k) - std::polar(0.9, 0.52)));
  EXPECT_LT(best, 1e-9);
  // The zero pair near the circle at 0.2 nearly annihilates the first output.
  const double near = std::abs(evaluate(w, 0.2).determinant());
  const double away = std::abs(evaluate(w, 1.0).determinant());
  EXPECT_LT(near, 1e-3 * away);
  EXPECT_EQ(bivariate_shaping_filter(7).A, bivariate_shaping_filter(7).A);
}

TEST(Pipeline, ArmaWithBothPriors) {
  const Scenario sc = generate_arma_example(500, 1);
  for (const PriorKind kind : {PriorKind::Constant, PriorKind::YuleWalker}) {
    EstimationConfig cfg;
    cfg.prior.kind = kind;
    cfg.prior.order = 3;
    const EstimationResult r = estimate_spectrum(sc.data, covariance_extension_bank(6), cfg);
    EXPECT_LT(r.solution.trace.records.back().grad_norm, 1e-9);
    EXPECT_LT(r.constraint_residual, 1e-6);
    EXPECT_TRUE(std::isfinite(r.hellinger));
    for (const Matrix& v : sample_left_spectrum(r.w_hat.realization, FrequencyGrid(256))) {
      EXPECT_GE(v(0, 0).real(), -1e-10);
    }
  }
}

TEST(Pipeline, UserArPrior) {
  const Scenario sc = generate_arma_example(500, 2);
  EstimationConfig cfg;
  cfg.prior.kind = PriorKind::UserAr;
  cfg.prior.user = fit_yule_walker(sc.data, 2);
  const EstimationResult r = estimate_spectrum(sc.data, covariance_extension_bank(4), cfg);
  EXPECT_LT(r.constraint_residual, 1e-6);
}

TEST(Pipeline, ApproximateMapsLambdaBack) {
  Rng rng(69);
  const FilterBank g = testing::random_bank(rng, 4, 1);
  const HermitianMatrix sigma = gamma_apply(g, rng.coercive_factor(2, 1));
  const Approximation a = approximate(g, sigma, Prior::from_left_factor(rng.coercive_factor(1, 1)));
  // Q from either coordinate system is the same function.
  const Realization gn = a.problem.bank.realization();
  for (double th : {0.2, 2.0}) {
    const Matrix v = evaluate(g.realization(), th);
    const Matrix vn = evaluate(gn, th);
    EXPECT_NEAR(std::abs((v.adjoint() * a.lambda.matrix() * v - vn.adjoint() * a.solution.lambda.matrix.matrix() * vn)(0, 0)),
                0.0, 1e-9);
  }
  EXPECT_LT((gamma_apply(g, a.w_hat) - sigma).norm() / sigma.norm(), 1e-8);
  HermitianMatrix bad = sigma;
  const GammaBasis basis = build_gamma_basis(g);
  const HermitianMatrix x = rng.positive_definite(4);
  bad = bad + (x - project_onto_range(basis, x));
  EXPECT_EQ(kind_of([&] { approximate(g, bad, Prior::constant(HermitianMatrix::identity(1))); }),
            ErrorKind::Infeasible);
}

TEST(Grids, AverageErrorCurveByHand) {
  const std::vector<Matrix> truth(3, Matrix::Identity(2, 2));
  std::vector<Matrix> r1(3, Matrix::Identity(2, 2));
  std::vector<Matrix> r2(3, Matrix::Identity(2, 2));
  r1[0](0, 0) += 2.0;  // spectral norm 2
  Matrix d = Matrix::Zero(2, 2);
  d(0, 1) = 3.0;
  d(1, 0) = 3.0;
  r2[0] += d;  // spectral norm 3
  r2[2] -= 0.5 * Matrix::Identity(2, 2);
  const RealVector e = average_error_curve({r1, r2}, truth);
  EXPECT_NEAR(e(0), 2.5, 1e-12);
  EXPECT_NEAR(e(1), 0.0, 1e-12);
  EXPECT_NEAR(e(2), 0.25, 1e-12);
  EXPECT_NEAR(average_error_curve({truth}, truth).norm(), 0.0, 1e-15);
  EXPECT_THROW(average_error_curve({std::vector<Matrix>(2, Matrix::Identity(2, 2))}, truth), Error);
}

TEST(Grids, DominantPeaks) {
  std::vector<double> th, v;
  for (int k = 0; k <= 100; ++k) {
    const double x = 0.03 * k;
    th.push_back(x);
    v.push_back(3.0 * std::exp(-50.0 * (x - 0.9) * (x - 0.9)) + 2.0 * std::exp(-50.0 * (x - 2.1) * (x - 2.1)) +
                0.5 * std::exp(-50.0 * (x - 1.5) * (x - 1.5)) + 4.0 * std::exp(-5.0 * x));
  }
  const std::vector<double> pk = dominant_peaks(th, v, 2);
  ASSERT_EQ(pk.size(), 2u);
  EXPECT_NEAR(pk[0], 0.9, 0.031);
  EXPECT_NEAR(pk[1], 2.1, 0.031);
}

}  // namespace
}  // namespace hellinger
