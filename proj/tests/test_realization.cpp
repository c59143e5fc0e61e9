#include "hellinger/realization.hpp"

#include <numbers>

#include <gtest/gtest.h>

#include "support/oracles.hpp"

namespace hellinger {
namespace {

using testing::Rng;

constexpr double kPi = std::numbers::pi;

/// Largest pointwise difference of two transfer functions on a grid.
double max_gap(const std::function<Matrix(double)>& f, const std::function<Matrix(double)>& g,
               int points = 257) {
  double worst = 0.0;
  for (int k = 0; k < points; ++k) {
    const double th = -kPi + 2.0 * kPi * k / points;
    worst = std::max(worst, (f(th) - g(th)).norm() / (1.0 + g(th).norm()));
  }
  return worst;
}

Matrix direct_eval(const Realization& r, double th) {
  const Complex z = std::polar(1.0, th);
  const Eigen::Index n = r.states();
  return r.D + r.C * (z * Matrix::Identity(n, n) - r.A).inverse() * r.B;
}

TEST(FrequencyGrid, UniformFromMinusPi) {
  const FrequencyGrid g(8);
  EXPECT_EQ(g.count(), 8);
  EXPECT_DOUBLE_EQ(g[0], -kPi);
  EXPECT_NEAR(g[4], 0.0, 1e-15);
  EXPECT_THROW(FrequencyGrid(0), Error);
}

TEST(Realization, RejectsInconsistentShapes) {
  EXPECT_THROW(Realization(Matrix::Zero(2, 2), Matrix::Zero(3, 1), Matrix::Zero(1, 2), Matrix::Zero(1, 1)),
               Error);
  EXPECT_THROW(Realization(Matrix::Zero(2, 2), Matrix::Zero(2, 1), Matrix::Zero(1, 2), Matrix::Zero(2, 1)),
               Error);
}

TEST(Realization, AlgebraMatchesPointwiseProducts) {
  Rng rng(11);
  const Realization f = rng.realization(3, 2, 2, 0.8);
  const Realization g = rng.realization(4, 2, 2, 0.6);
  const Matrix k = rng.matrix(3, 2);
  auto ev = [](const Realization& r) { return [r](double th) { return evaluate(r, th); }; };

  EXPECT_LT(max_gap(ev(f), [&](double th) { return direct_eval(f, th); }), 1e-12);
  EXPECT_LT(max_gap(ev(series(f, g)), [&](double th) { return Matrix(evaluate(f, th) * evaluate(g, th)); }),
            1e-12);
  EXPECT_LT(max_gap(ev(parallel(f, g)), [&](double th) { return Matrix(evaluate(f, th) + evaluate(g, th)); }),
            1e-12);
  EXPECT_LT(max_gap(ev(left_multiply(k, f)), [&](double th) { return Matrix(k * evaluate(f, th)); }), 1e-12);
  EXPECT_LT(max_gap(ev(right_multiply(f, k.transpose())),
                    [&](double th) { return Matrix(evaluate(f, th) * k.transpose()); }),
            1e-12);
  EXPECT_LT(max_gap(ev(transpose(f)), [&](double th) { return Matrix(evaluate(f, th).transpose()); }), 1e-12);
}

TEST(Realization, MinimalRealizationDropsHiddenModes) {
  Rng rng(12);
  const Realization f = rng.realization(3, 1, 1, 0.8);
  // F - F has no dynamics; F + F keeps three states.
  const Realization twice = parallel(f, f);
  const Realization m = minimal_realization(twice);
  EXPECT_EQ(m.states(), 3);
  EXPECT_LT(max_gap([&](double th) { return evaluate(m, th); }, [&](double th) { return evaluate(twice, th); }),
            1e-10);
  const Realization zero = minimal_realization(parallel(f, left_multiply(-Matrix::Identity(1, 1), f)));
  EXPECT_EQ(zero.states(), 0);
  EXPECT_LT(zero.D.norm(), 1e-12);
}

TEST(Realization, ControllableAndObservableParts) {
  // Block-diagonal system whose second mode is neither reachable nor seen.
  Matrix a = Matrix::Zero(2, 2);
  a(0, 0) = 0.5;
  a(1, 1) = -0.3;
  Matrix b = Matrix::Zero(2, 1);
  b(0, 0) = 1.0;
  Matrix c = Matrix::Zero(1, 2);
  c(0, 0) = 2.0;
  const Realization r(a, b, c, Matrix::Identity(1, 1));
  EXPECT_EQ(controllable_part(r).states(), 1);
  EXPECT_EQ(observable_part(r).states(), 1);
  EXPECT_EQ(minimal_realization(r).states(), 1);
}

TEST(Realization, BalancedTruncationDropsHiddenMode) {
  // A pole at the origin that C cannot see, hidden inside clustered poles.
  Rng rng(13);
  const Eigen::Index n = 5;
  Matrix a = Matrix::Zero(n, n);
  for (Eigen::Index k = 1; k < n; ++k) a(k, k) = 0.9 * std::polar(1.0, 0.42 + 0.01 * k);
  Matrix c = rng.matrix(1, n);
  c(0, 0) = 0.0;
  const Realization r(a, rng.matrix(n, 1), c, Matrix::Identity(1, 1));
  const Realization reduced = balanced_truncation(r);
  EXPECT_EQ(reduced.states(), n - 1);
  EXPECT_LT(max_gap([&](double th) { return evaluate(reduced, th); },
                    [&](double th) { return evaluate(r, th); }),
            1e-10);
}

TEST(Realization, BalancedTruncationRescuesBadScaling) {
  // Minimal, but a diagonal similarity pushes the observability Gramian past
  // the condition right_to_left accepts.
  Rng rng(131);
  const Realization r0 = rng.realization(4, 1, 1, 0.8);
  Matrix s = Matrix::Zero(4, 4);
  for (int k = 0; k < 4; ++k) s(k, k) = std::pow(300.0, k - 1.5);
  const Matrix si = s.inverse();
  const Realization r(si * r0.A * s, si * r0.B, r0.C * s, r0.D);
  const RealVector obs =
      Eigen::SelfAdjointEigenSolver<Matrix>(
          solve_discrete_lyapunov(r.A.adjoint(), HermitianMatrix(r.C.adjoint() * r.C)).matrix())
          .eigenvalues();
  ASSERT_LT(obs(0), kObservabilityGramianTol * obs(3));
  const Realization b = balanced_truncation(r);
  EXPECT_EQ(b.states(), 4);
  EXPECT_LT(max_gap([&](double th) { return evaluate(b, th); }, [&](double th) { return evaluate(r0, th); }),
            1e-9);
  const Matrix p = solve_discrete_lyapunov(b.A, HermitianMatrix(b.B * b.B.adjoint())).matrix();
  const Matrix q = solve_discrete_lyapunov(b.A.adjoint(), HermitianMatrix(b.C.adjoint() * b.C)).matrix();
  EXPECT_LT((p - q).norm() / p.norm(), 1e-6);
  EXPECT_LT((p - Matrix(p.diagonal().asDiagonal())).norm() / p.norm(), 1e-6);
}

TEST(LyapunovIntegral, MatchesQuadrature) {
  Rng rng(14);
  for (int trial = 0; trial < 10; ++trial) {
    const Realization w = rng.realization(rng.integer(1, 8), rng.integer(1, 3), rng.integer(1, 3), 0.9);
    const Matrix exact = lyapunov_integral(w).matrix();
    const Matrix quad = testing::quadrature(
        [&](double th) {
          const Matrix v = evaluate(w, th);
          return Matrix(v * v.adjoint());
        },
        4096);
    EXPECT_LT(testing::relative_error(exact, quad), 1e-8);
  }
}

TEST(LyapunovIntegral, StaticGain) {
  const Matrix d = Matrix::Constant(2, 2, Complex(1.0, 1.0));
  EXPECT_LT((lyapunov_integral(Realization::constant(d)).matrix() - d * d.adjoint()).norm(), 1e-14);
}

TEST(Factorization, CausalPartAndMinimumPhaseFactor) {
  Rng rng(15);
  for (int trial = 0; trial < 10; ++trial) {
    const Eigen::Index m = rng.integer(1, 3);
    const Realization w = rng.coercive_factor(rng.integer(1, 5), m);
    const CausalPart z = causal_part(w);
    auto phi = [&](double th) {
      const Matrix v = evaluate(w, th);
      return Matrix(v * v.adjoint());
    };
    EXPECT_LT(max_gap(
                  [&](double th) {
                    const Matrix zv = evaluate(z.realization, th);
                    return Matrix(zv + zv.adjoint());
                  },
                  phi),
              1e-10);
    const SpectralFactor mp = min_phase_factor(z);
    EXPECT_LT(max_gap(
                  [&](double th) {
                    const Matrix v = evaluate(mp.realization, th);
                    return Matrix(v * v.adjoint());
                  },
                  phi),
              1e-8);
    // Minimum phase: the inverse is stable.
    EXPECT_TRUE(is_stable(invert_realization(mp.realization).A));
  }
}

TEST(Factorization, LeftRightConversions) {
  Rng rng(16);
  for (int trial = 0; trial < 10; ++trial) {
    const Eigen::Index m = rng.integer(1, 3);
    const Realization w = minimal_realization(rng.realization(rng.integer(1, 5), m, m, 0.8));
    const SpectralFactor w1 = left_to_right(SpectralFactor{w, FactorSide::Left});
    EXPECT_EQ(w1.side, FactorSide::Right);
    EXPECT_LT(max_gap(
                  [&](double th) {
                    const Matrix v = evaluate(w1.realization, th);
                    return Matrix(v.adjoint() * v);
                  },
                  [&](double th) {
                    const Matrix v = evaluate(w, th);
                    return Matrix(v * v.adjoint());
                  }),
              1e-8);
    const SpectralFactor h1 = right_to_left(SpectralFactor{w, FactorSide::Right});
    EXPECT_LT(max_gap(
                  [&](double th) {
                    const Matrix v = evaluate(h1.realization, th);
                    return Matrix(v * v.adjoint());
                  },
                  [&](double th) {
                    const Matrix v = evaluate(w, th);
                    return Matrix(v.adjoint() * v);
                  }),
              1e-8);
  }
}

TEST(Factorization, WrongSideIsRejected) {
  Rng rng(17);
  const Realization w = rng.realization(2, 1, 1, 0.5);
  EXPECT_THROW(left_to_right(SpectralFactor{w, FactorSide::Right}), Error);
  EXPECT_THROW(right_to_left(SpectralFactor{w, FactorSide::Left}), Error);
}

TEST(Factorization, InverseRealization) {
  Rng rng(18);
  const Realization f = rng.coercive_factor(3, 2);
  const Realization fi = invert_realization(f);
  EXPECT_LT(max_gap([&](double th) { return Matrix(evaluate(f, th) * evaluate(fi, th)); },
                    [](double) { return Matrix(Matrix::Identity(2, 2)); }),
            1e-10);
  const Realization singular(f.A, f.B, f.C, Matrix::Zero(2, 2));
  EXPECT_THROW(invert_realization(singular), Error);
}

TEST(CrossIntegral, MatchesQuadrature) {
  Rng rng(19);
  for (int trial = 0; trial < 10; ++trial) {
    const Realization f1 = rng.realization(rng.integer(0, 5), 2, rng.integer(1, 3), 0.85);
    const Realization f2 = rng.realization(rng.integer(0, 5), 2, rng.integer(1, 3), 0.85);
    const Matrix quad =
        testing::quadrature([&](double th) { return Matrix(evaluate(f1, th) * evaluate(f2, th).adjoint()); }, 4096);
    EXPECT_LT(testing::relative_error(cross_integral(f1, f2), quad), 1e-9);
  }
}

TEST(TwoSided, SplitsEvaluateToProducts) {
  Rng rng(20);
  const Realization f1 = rng.realization(3, 2, 2, 0.8);
  const Realization f2 = rng.realization(4, 2, 2, 0.7);
  const Realization f3 = rng.realization(2, 2, 2, 0.6);
  const TwoSided p = split_product(f1, f2);
  EXPECT_EQ(p.anticausal.D.norm(), 0.0);
  EXPECT_LT(max_gap([&](double th) { return evaluate(p, th); },
                    [&](double th) { return Matrix(evaluate(f1, th) * evaluate(f2, th).adjoint()); }),
            1e-11);
  const TwoSided q = split_adjoint_product(f1, f2);
  EXPECT_LT(max_gap([&](double th) { return evaluate(q, th); },
                    [&](double th) { return Matrix(evaluate(f1, th).adjoint() * evaluate(f2, th)); }),
            1e-11);
  const TwoSided r = left_multiply(f3, q);
  EXPECT_LT(max_gap([&](double th) { return evaluate(r, th); },
                    [&](double th) { return Matrix(evaluate(f3, th) * evaluate(q, th)); }),
            1e-11);
  EXPECT_LT(max_gap([&](double th) { return evaluate(transpose(r), th); },
                    [&](double th) { return Matrix(evaluate(r, th).transpose()); }),
            1e-11);
}

TEST(TwoSided, CrossIntegralMatchesQuadrature) {
  Rng rng(21);
  for (int trial = 0; trial < 5; ++trial) {
    const TwoSided u = split_adjoint_product(rng.realization(3, 2, 2, 0.8), rng.realization(2, 2, 2, 0.7));
    const TwoSided v = split_product(rng.realization(2, 2, 2, 0.6), rng.realization(3, 2, 2, 0.75));
    const Matrix quad =
        testing::quadrature([&](double th) { return Matrix(evaluate(u, th) * evaluate(v, th).adjoint()); }, 4096);
    EXPECT_LT(testing::relative_error(cross_integral(u, v), quad), 1e-9);
  }
}

TEST(FactorizeQ, SpectralIdentities) {
  Rng rng(22);
  for (int trial = 0; trial < 10; ++trial) {
    const Eigen::Index n = rng.integer(1, 6);
    const Eigen::Index m = rng.integer(1, 2);
    const Matrix a = rng.stable(n, 0.8);
    const Matrix b = rng.matrix(n, m);
    const HermitianMatrix lambda = rng.positive_definite(n, 0.1) * 0.3;
    const QFactorization q = factorize_Q(a, b, lambda);
    const Realization g = Realization::filter(a, b);
    auto q_of = [&](double th) {
      const Matrix gv = evaluate(g, th);
      return Matrix(Matrix::Identity(m, m) + gv.adjoint() * lambda.matrix() * gv);
    };
    EXPECT_LT(max_gap(
                  [&](double th) {
                    const Matrix d = evaluate(q.Delta, th);
                    return Matrix(d.adjoint() * d);
                  },
                  q_of),
              1e-9);
    EXPECT_LT(max_gap([&](double th) { return Matrix(evaluate(q.Delta, th) * evaluate(q.DeltaInv, th)); },
                      [&](double) { return Matrix(Matrix::Identity(m, m)); }),
              1e-10);
    EXPECT_TRUE(is_stable(q.DeltaInv.A));
    const Realization f = filter_times_delta_inv(q, b);
    EXPECT_LT(max_gap([&](double th) { return evaluate(f, th); },
                      [&](double th) { return Matrix(evaluate(g, th) * evaluate(q.DeltaInv, th)); }),
              1e-10);
  }
}

TEST(FactorizeQ, OutsideTheDomain) {
  const Matrix a = Matrix::Constant(1, 1, 0.5);
  const Matrix b = Matrix::Constant(1, 1, 1.0);
  try {
    factorize_Q(a, b, HermitianMatrix(Matrix::Constant(1, 1, -10.0)));
    FAIL() << "expected NotInDomain";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotInDomain);
  }
}

TEST(FactorizeQ, ZeroLambdaIsIdentity) {
  Rng rng(23);
  const QFactorization q = factorize_Q(rng.stable(3, 0.5), rng.matrix(3, 1), HermitianMatrix::zero(3));
  EXPECT_LT((evaluate(q.Delta, 0.3) - Matrix::Identity(1, 1)).norm(), 1e-12);
}

TEST(SampleSpectrum, HermitianPsdOnGrid) {
  Rng rng(24);
  const Realization w = rng.realization(3, 2, 2, 0.9);
  for (const Matrix& v : sample_left_spectrum(w, FrequencyGrid(64))) {
    EXPECT_LT((v - v.adjoint()).norm(), 1e-12);
    EXPECT_GE(min_eigenvalue(HermitianMatrix(v)), -1e-12);
  }
}

}  // namespace
}  // namespace hellinger
