#include "ecoclone/ansatz.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

using namespace ecoclone;

namespace {

XParams random_x(Rng& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  return {g(rng), g(rng), g(rng)};
}

Vec random_alpha(int d, Rng& rng) {
  const Vec a = gaussian_matrix(d, 1, rng).col(0);
  return a / a.norm();
}

AmplitudeMatrix random_amplitudes(int d, Rng& rng) {
  const Mat a = gaussian_matrix(d, d, rng);
  return AmplitudeMatrix(a / a.norm());
}

}  // namespace

TEST(AmplitudeMatrix, ValidatesShapeAndNorm) {
  EXPECT_THROW(AmplitudeMatrix(Mat::Identity(2, 3)), std::invalid_argument);
  EXPECT_THROW(AmplitudeMatrix(Mat::Identity(2, 2)), std::invalid_argument);
  EXPECT_THROW(amp_universal({0.5, 0.1, 0.1}, 2), std::invalid_argument);
  EXPECT_EQ(AmplitudeMatrix(Mat::Identity(2, 2) / std::sqrt(2.0)).label(), "custom");
}

TEST(CloningState, MatchesBellSumOracleAndIsUnit) {
  Rng rng = make_rng(1);
  for (int d = 2; d <= 4; ++d) {
    const AmplitudeMatrix a = random_amplitudes(d, rng);
    const Ket psi = cloning_state(a);
    EXPECT_LT((psi.amps() - oracle::cloning_state(a.mat())).norm(), 1e-13);
    EXPECT_NEAR(psi.norm(), 1.0, 1e-13);
  }
}

TEST(ReducedChoi, AlwaysTracePreserving) {
  Rng rng = make_rng(2);
  for (int d = 2; d <= 4; ++d)
    for (int t = 0; t < 3; ++t) {
      const ChoiOp s = reduced_choi(cloning_state(random_amplitudes(d, rng)));
      EXPECT_LT(is_trace_preserving(s).residual, 1e-12);
      EXPECT_NEAR(s.op().trace().real(), d, 1e-12);
    }
}

TEST(ReducedChoi, EqualsScaledPartialTrace) {
  Rng rng = make_rng(3);
  const Ket psi = cloning_state(random_amplitudes(3, rng));
  const Op direct = partial_trace(Op::projector(psi), {0, 1, 2});
  EXPECT_LT((reduced_choi(psi).mat() - 3.0 * direct.mat()).norm(), 1e-13);
}

TEST(SupportStates, SpanEqualsRangeOfChoi) {
  Rng rng = make_rng(4);
  for (int d = 2; d <= 4; ++d) {
    const AmplitudeMatrix a = random_amplitudes(d, rng);
    const ChoiOp s = reduced_choi(cloning_state(a));
    Eigen::SelfAdjointEigenSolver<Mat> es(s.mat());
    std::vector<Ket> range;
    const Eigen::Index n = s.mat().rows();
    for (Eigen::Index i = n - d; i < n; ++i) range.emplace_back(Dims{d, d, d}, es.eigenvectors().col(i));
    EXPECT_LT(subspace_distance(support_states(a), range), 1e-8) << "d=" << d;
    EXPECT_LT(es.eigenvalues()[n - d - 1], 1e-12);
  }
}

TEST(SupportStates, DeltaAmplitudeGivesMaximallyEntangledTimesBasis) {
  const int d = 3;
  Mat m = Mat::Zero(d, d);
  m(0, 0) = 1.0;
  const std::vector<Ket> sup = support_states(AmplitudeMatrix(m));
  for (int p = 0; p < d; ++p) {
    const Ket expect = (1.0 / std::sqrt(3.0)) * tensor(max_entangled(d), basis_ket(d, p));
    EXPECT_LT((sup[static_cast<std::size_t>(p)].amps() - expect.amps()).norm(), 1e-14);
  }
}

TEST(SupportStates, SymmetricUniversalSpansConjecturedEigenspace) {
  for (int d = 2; d <= 5; ++d) {
    const auto a = amp_universal(symmetric_universal_params(d), d);
    EXPECT_LT(subspace_distance(support_states(a), conjectured_eigenstates(Family::universal, d)), 1e-8);
  }
}

TEST(Normalization, FourierNormEqualsFPlusGOverD) {
  Rng rng = make_rng(5);
  for (int d = 2; d <= 7; ++d)
    for (int t = 0; t < 5; ++t) {
      const XParams x = normalize_params(Family::fourier, random_x(rng), d);
      EXPECT_NEAR(poly_f(x, d) + poly_g(x, d) / d, 1.0, 1e-12);
    }
}

TEST(Normalization, PhaseCovariantPolynomial) {
  Rng rng = make_rng(6);
  for (int d = 2; d <= 6; ++d) {
    const XParams x = random_x(rng);
    const double dd = d;
    const double poly = x.x1 * x.x1 + dd * dd * x.x3 * x.x3 + dd * x.x2 * x.x2 + 2 * x.x1 * x.x2 + 2 * x.x1 * x.x3 +
                        2 * dd * x.x2 * x.x3;
    EXPECT_NEAR(amplitude_norm2(Family::phase_covariant, x, d), poly, 1e-11);
  }
}

TEST(SymmetricUniversal, NormalizedAndSaturating) {
  for (int d = 2; d <= 5; ++d) {
    const XParams x = symmetric_universal_params(d);
    EXPECT_NEAR(amplitude_norm2(Family::universal, x, d), 1.0, 1e-14);
    const ChoiOp s = reduced_choi(cloning_state(amp_universal(x, d)));
    EXPECT_NEAR(mean_fidelity(s, r_universal(d)), (d + 3.0) / (2.0 * (d + 1.0)), 1e-12);
  }
}

TEST(SymmetricUniversal, ClonesAreSymmetricOnHaarStates) {
  Rng rng = make_rng(7);
  const int d = 3;
  const ChoiOp s = reduced_choi(cloning_state(amp_universal(symmetric_universal_params(d), d)));
  for (int t = 0; t < 5; ++t) {
    const CloneFidelities f = clone_fidelities(s, haar_ket(d, rng));
    EXPECT_NEAR(f.bob, f.eve, 1e-10);
    EXPECT_NEAR(f.bob, (d + 3.0) / (2.0 * (d + 1.0)), 1e-10);
  }
}

TEST(OptimizeParams, ReachesBoundForQubitsAndQutrits) {
  for (Family f : {Family::phase_covariant, Family::fourier})
    for (int d = 2; d <= 3; ++d) {
      const OptimalParams p = optimize_xparams(f, d);
      EXPECT_NEAR(p.fidelity, p.bound, 1e-9) << to_string(f) << " d=" << d;
      const ChoiOp s = reduced_choi(cloning_state(amp_family(f, p.x, d)));
      EXPECT_NEAR(mean_fidelity(s, r_operator(f, d)), p.bound, 1e-9);
      EXPECT_GE(p.x.x1, 0.0);
    }
}

TEST(OptimizeParams, FourierOptimumSatisfiesNoExtraInformationRelation) {
  for (int d = 2; d <= 4; ++d) {
    const XParams x = optimize_xparams(Family::fourier, d).x;
    EXPECT_NEAR(x.x2 * x.x2, x.x1 * x.x3, 1e-12) << "d=" << d;
    EXPECT_GT(x.x2, 0.0);
  }
}

TEST(OptimizeParams, PhaseCovariantOptimumHasNegativeX2) {
  const XParams x = optimize_xparams(Family::phase_covariant, 2).x;
  EXPECT_NEAR(x.x1, 1 / std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(x.x2, (1 - std::sqrt(2.0)) / 2, 1e-12);
  EXPECT_NEAR(x.x3, 1 / std::sqrt(8.0), 1e-12);
}

TEST(OptimizeParams, PhaseCovariantIdentityHoldsOnlyForQubits) {
  const XParams x2 = optimize_xparams(Family::phase_covariant, 2).x;
  EXPECT_NEAR(pc_system_check(x2, 2).identity_defect, 0.0, 1e-12);
  const XParams x3 = optimize_xparams(Family::phase_covariant, 3).x;
  EXPECT_GT(std::abs(pc_system_check(x3, 3).identity_defect), 1e-3);
}

TEST(Constraints, FourierPolynomialsMatchInnerProductOracle) {
  Rng rng = make_rng(8);
  for (Family f : {Family::universal, Family::fourier})
    for (int d = 2; d <= 4; ++d)
      for (int t = 0; t < 10; ++t) {
        XParams x = random_x(rng);
        if (f == Family::universal) x.x2 = 0.0;
        x = normalize_params(f, x, d);
        const Vec alpha = random_alpha(d, rng);
        const ConstraintResiduals c = constraint_residuals(f, x, alpha, d);
        const Mat g = oracle::economical_gram(amp_family(f, x, d).mat(), alpha);
        for (int k = 0; k < d; ++k) {
          EXPECT_NEAR(c.diagonal[static_cast<std::size_t>(k)], g(k, k).real() - 1.0, 1e-10);
          for (int kp = 0; kp < d; ++kp)
            if (kp != k) {
              EXPECT_LT(std::abs(c.off_diagonal(kp, k) - g(kp, k)), 1e-10);
            }
        }
      }
}

TEST(Constraints, PhaseCovariantDerivedFormsMatchOracle) {
  Rng rng = make_rng(9);
  for (int d = 2; d <= 4; ++d)
    for (int t = 0; t < 10; ++t) {
      const XParams x = normalize_params(Family::phase_covariant, random_x(rng), d);
      const Vec alpha = random_alpha(d, rng);
      const ConstraintResiduals c = constraint_residuals(Family::phase_covariant, x, alpha, d);
      const Mat g = oracle::economical_gram(amp_phase_covariant(x, d).mat(), alpha);
      for (int k = 0; k < d; ++k) {
        EXPECT_NEAR(c.diagonal[static_cast<std::size_t>(k)], g(k, k).real() - 1.0, 1e-10);
        for (int kp = 0; kp < d; ++kp)
          if (kp != k) {
            EXPECT_LT(std::abs(c.off_diagonal(kp, k) - g(kp, k)), 1e-10);
          }
      }
    }
}

TEST(Constraints, PrintedPhaseCovariantOffDiagonalDisagreesWithOracle) {
  // The form 2d x1 x3 alpha*_{-k'} alpha_k differs from the Gram matrix.
  Rng rng = make_rng(10);
  const int d = 3;
  const XParams x = normalize_params(Family::phase_covariant, {0.7, -0.1, 0.2}, d);
  const Vec alpha = random_alpha(d, rng);
  const Mat g = oracle::economical_gram(amp_phase_covariant(x, d).mat(), alpha);
  double worst = 0.0;
  for (int k = 0; k < d; ++k)
    for (int kp = 0; kp < d; ++kp)
      if (kp != k) {
        const cplx printed = 2.0 * d * x.x1 * x.x3 * std::conj(alpha[(d - kp) % d]) * alpha[k];
        worst = std::max(worst, std::abs(printed - g(kp, k)));
      }
  EXPECT_GT(worst, 1e-3);
}

TEST(Constraints, NormalizationDefectVanishesForNormalizedParams) {
  const XParams x = normalize_params(Family::fourier, {0.3, 0.2, 0.1}, 3);
  Vec alpha = Vec::Zero(3);
  alpha[0] = 1.0;
  EXPECT_NEAR(constraint_residuals(Family::fourier, x, alpha, 3).normalization_defect, 0.0, 1e-14);
  EXPECT_THROW(constraint_residuals(Family::fourier, x, Vec::Zero(2), 3), std::invalid_argument);
}

TEST(AnsatzSearch, FourierQubitOptimumIsEconomical) {
  const XParams x = optimize_xparams(Family::fourier, 2).x;
  const AnsatzFeasibility af = economical_ansatz_search(Family::fourier, x, 2, 20, 0);
  EXPECT_EQ(af.verdict, Verdict::feasible);
  EXPECT_LT(af.residual, 1e-9);
}

TEST(AnsatzSearch, UniversalOffDiagonalSystemUnsolvable) {
  for (int d = 2; d <= 5; ++d) {
    const AnsatzFeasibility af = economical_ansatz_search(Family::universal, symmetric_universal_params(d), d, 100, 0);
    EXPECT_EQ(af.verdict, Verdict::infeasible) << "d=" << d << " residual " << af.residual;
    EXPECT_GT(af.residual, 1e-3);
  }
}

TEST(Recurrence, AmplitudesSatisfyRecurrence) {
  const int d = 6;
  const Vec a = recurrence_amplitudes(d, 0.37) * std::sqrt(6.0);
  for (int k = 1; k + 1 < d; ++k) EXPECT_LT(std::abs(a[k + 1] + a[k] * a[k] * std::conj(a[k - 1])), 1e-13);
}

TEST(Recurrence, SolvableOnlyForQubits) {
  const RecurrenceReport r2 = fourier_recurrence_check(2);
  EXPECT_TRUE(r2.shift_two_trivial);
  EXPECT_EQ(r2.verdict, Verdict::feasible);
  for (int d = 3; d <= 5; ++d) {
    const RecurrenceReport r = fourier_recurrence_check(d);
    EXPECT_EQ(r.verdict, Verdict::infeasible) << "d=" << d;
    EXPECT_GT(r.min_system_residual, 1e-3);
  }
}

TEST(Recurrence, ShiftTwoAutocorrelationAloneVanishesAtFour) {
  // The m = 2 autocorrelation has a zero at d = 4; the full system does not.
  const RecurrenceReport r = fourier_recurrence_check(4, 4096);
  ASSERT_TRUE(r.min_shift_two.has_value());
  EXPECT_LT(*r.min_shift_two, 1e-12);
  EXPECT_GT(*fourier_recurrence_check(3).min_shift_two, 0.3);
}

TEST(PcSystem, SolvableOnlyForQubits) {
  const PcSystemReport r2 = pc_system_check(optimize_xparams(Family::phase_covariant, 2).x, 2);
  EXPECT_TRUE(r2.solvable);
  for (int d = 3; d <= 5; ++d) {
    const PcSystemReport r = pc_system_check(optimize_xparams(Family::phase_covariant, d).x, d);
    EXPECT_FALSE(r.solvable);
    EXPECT_GT(std::abs(r.off_support), 1e-3);
  }
}

TEST(PcSystem, IdentityChannelFlaggedDegenerate) {
  for (int d = 2; d <= 5; ++d) {
    const PcSystemReport r = pc_system_check({1.0, 0.0, 0.0}, d);
    EXPECT_NEAR(r.off_support, 0.0, 1e-15);
    EXPECT_TRUE(r.degenerate);
    EXPECT_FALSE(r.solvable);
  }
}
