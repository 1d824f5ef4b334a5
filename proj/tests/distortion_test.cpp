#include "lsf/families.hpp"
#include "lsf/suites.hpp"

#include <gtest/gtest.h>

using namespace lsf;
using namespace lsf::testkit;

TEST(CondLog, OneDimensionalIsZero)
{
  auto const F = make_three_branch(0.4);
  EXPECT_EQ(cond_log(F, Word{{0, 1, 2}}, make_vec({0.3})), 0.0);
  EXPECT_EQ(cond_log(perturbed_1d(), Word{{2, 2}}, make_vec({-0.5})), 0.0);
}

TEST(CondLog, DiagonalMap)
{
  auto const F = diag_single();
  Vec const x = make_vec({0.1, 0.2});
  EXPECT_NEAR(cond_log(F, Word{{0}}, x), std::log(2.0), 1e-15);
  EXPECT_NEAR(cond_log(F, Word{{0, 0}}, x), std::log(4.0), 1e-15);
}

TEST(CondLog, SingularJacobianThrows)
{
  Mat J(2, 2);
  J << 1.0, 0.0, 0.0, 1e-16;
  EXPECT_THROW(cond_log(J), singularity_error);
}

TEST(QofN, OneDimensionalAndConformalSystemsVanish)
{
  for (auto const &F : {make_three_branch(0.2), perturbed_1d(), conformal_2d()})
  {
    auto const r = Q_of_n(F, 5);
    ASSERT_EQ(r.Q.size(), 5u);
    for (double q : r.Q)
      EXPECT_NEAR(q, 0.0, 1e-12);
  }
}

TEST(QofN, DiagonalPowersGrowLinearly)
{
  auto const r = Q_of_n(diag_single(), 8);
  for (int n = 1; n <= 8; ++n)
  {
    EXPECT_NEAR(r.Q_at(n), n * std::log(2.0), 1e-12);
    EXPECT_TRUE(r.exhaustive_Q[n - 1]);
  }
  auto const d = semi_conformality_diagnostic(diag_single(), 8);
  EXPECT_EQ(d.verdict, Conformality::flat_positive);
  EXPECT_NEAR(d.ratios.back(), std::log(2.0), 1e-12);
}

TEST(QofN, MonotoneInDepth)
{
  for (auto const &F : {diag_pair(), perturbed_2d()})
  {
    auto const r = distortion_report(F, 5);
    for (std::size_t i = 1; i < r.Q.size(); ++i)
    {
      EXPECT_GE(r.Q[i], r.Q[i - 1]);
      EXPECT_GE(r.D[i], r.D[i - 1]);
    }
  }
}

TEST(QofN, WordCapIsEnforcedForAffineSystems)
{
  Sampling s;
  s.word_cap = 100;
  EXPECT_THROW(Q_of_n(diag_pair(), 8, s), cap_error);
}

TEST(CMatrix, AffineIsTheIdentity)
{
  auto const F = diag_pair();
  Mat const C = C_matrix(F, Word{{0, 1, 1}}, make_vec({0.3, 0.1}), make_vec({-0.5, 0.2}));
  EXPECT_LE((C - Mat::Identity(2, 2)).norm(), 1e-15);
}

TEST(CMatrix, EqualBasePointsGiveTheIdentity)
{
  auto const F = perturbed_2d();
  Vec const x = make_vec({0.2, -0.3});
  EXPECT_LE((C_matrix(F, Word{{1, 0, 1}}, x, x) - Mat::Identity(2, 2)).norm(), 1e-14);
}

TEST(CMatrix, InversionIdentity)
{
  auto const F = perturbed_2d();
  std::mt19937_64 rng(8);
  for (int i = 0; i < 30; ++i)
  {
    auto const w = random_word(rng, F, 1, 6);
    Vec const x = random_in_ball(rng, 2), y = random_in_ball(rng, 2);
    EXPECT_LE((C_matrix(F, w, x, y) * C_matrix(F, w, y, x) - Mat::Identity(2, 2)).norm(), 1e-10);
  }
}

TEST(DofN, AffineVanishes)
{
  for (auto const &F : {make_three_branch(0.1), diag_pair(), conformal_2d()})
    for (double d : D_of_n(F, 5).D)
      EXPECT_EQ(d, 0.0);
}

TEST(DofN, QuadraticMapClosedForm)
{
  // sup |ln((1/3 + 0.04y)/(1/3 + 0.04x))| at x, y = -1, 1.
  auto const r = D_of_n(perturbed_1d_single(), 1);
  double const exact = std::log((1.0 / 3 + 0.04) / (1.0 / 3 - 0.04));
  EXPECT_NEAR(r.D_at(1), exact, 1e-9);
  EXPECT_LE(r.D_at(1), exact + 1e-15);
}

TEST(DistortionBound, AffineHasZeroLhs)
{
  auto const F = make_three_branch(0.3);
  auto const rep = distortion_report(F, 4);
  auto const tr = make_trace(F, Word{{0, 1, 2, 1}}, make_vec({-0.4}), make_vec({0.8}));
  auto const chk = verify_distortion_bound(F, tr, make_vec({1.0}), rep);
  EXPECT_EQ(chk.lhs, 0.0);
  EXPECT_TRUE(chk.pass);
}

TEST(DistortionBound, EqualBasePointsHaveZeroLhs)
{
  auto const F = perturbed_1d();
  auto const rep = Q_of_n(F, 4);
  auto const tr = make_trace(F, Word{{0, 1, 2, 1}}, make_vec({0.3}), make_vec({0.3}));
  auto const chk = verify_distortion_bound(F, tr, make_vec({1.0}), rep);
  EXPECT_EQ(chk.lhs, 0.0);
  EXPECT_TRUE(chk.pass);
}

TEST(DistortionBound, QuadraticPerturbationRandomTrials)
{
  auto const F = perturbed_1d();
  auto const rep = Q_of_n(F, 10);
  std::mt19937_64 rng(42);
  int passes = 0;
  for (int i = 0; i < 100; ++i)
  {
    auto const w = random_word(rng, F, 1, 10);
    auto const tr = make_trace(F, w, random_in_ball(rng, 1), random_in_ball(rng, 1));
    auto const chk = verify_distortion_bound(F, tr, make_vec({1.0}), rep);
    EXPECT_GE(chk.rhs, chk.lhs);
    passes += chk.pass;
  }
  EXPECT_EQ(passes, 100);
}

TEST(DistortionBound, TraceDiametersShrink)
{
  auto const F = perturbed_1d();
  auto const tr = make_trace(F, Word{{0, 2, 1}}, make_vec({-1.0}), make_vec({1.0}));
  // |B_j| for j = 0..n-1.
  ASSERT_EQ(tr.diameters.size(), 3u);
  EXPECT_DOUBLE_EQ(tr.diameters[0], 2.0);
  for (std::size_t i = 1; i < tr.diameters.size(); ++i)
    EXPECT_LT(tr.diameters[i], tr.diameters[i - 1]);
}

TEST(Scaling, OneDimensionalAffineIsExact)
{
  auto const F = make_three_branch(0.2);
  auto const rep = distortion_report(F, 3);
  auto const chk = verify_scaling(F, Word{{1, 2}}, Word{{0}}, Ball(make_vec({0.1}), 0.3), rep);
  EXPECT_NEAR(chk.lhs, 0.0, 1e-12);
  EXPECT_TRUE(chk.pass);
}

TEST(Scaling, ConformalSystemHasZeroBound)
{
  auto const F = conformal_2d();
  auto const rep = distortion_report(F, 3);
  auto const chk =
      verify_scaling(F, Word{{1, 2}}, Word{{0, 1}}, Ball(make_vec({0.1, -0.2}), 0.4), rep);
  EXPECT_NEAR(chk.lhs, 0.0, 1e-12);
  EXPECT_NEAR(chk.rhs, 0.0, 1e-12);
  EXPECT_TRUE(chk.pass);
}

TEST(Scaling, DiagonalPairIsPositiveButBounded)
{
  // f_a = diag(1/4,1/2) after f_b = diag(1/2,1/4): the product is 1/8 Id,
  // so the diameter ratio is (1/8)/(1/2 * 1/2) = 1/2 and lhs = ln 2.
  auto const F = diag_pair();
  auto const rep = distortion_report(F, 1);
  auto const chk = verify_scaling(F, Word{{1}}, Word{{0}}, Ball(make_vec({0.0, 0.0}), 0.5), rep);
  EXPECT_NEAR(chk.lhs, std::log(2.0), 1e-12);
  EXPECT_LE(chk.lhs, 2.0 * rep.Q_at(1));
  EXPECT_TRUE(chk.pass);
}

TEST(Scaling, SingleDiagonalMapCancels)
{
  // One map: f_a f_b = A^2 and the ratio (1/4)/(1/2 * 1/2) = 1.
  auto const F = diag_single();
  auto const rep = distortion_report(F, 1);
  auto const chk = verify_scaling(F, Word{{0}}, Word{{0}}, Ball(make_vec({0.1, 0.0}), 0.5), rep);
  EXPECT_NEAR(chk.lhs, 0.0, 1e-12);
}

TEST(Scaling, WordsLongerThanTheDepthAreRejected)
{
  auto const F = diag_pair();
  auto const rep = distortion_report(F, 1);
  EXPECT_THROW(verify_scaling(F, Word{{0, 1}}, Word{{0}}, Ball(make_vec({0.0, 0.0}), 0.5), rep),
               precondition_error);
}

TEST(MeanValue, AffineRatios)
{
  System const F1(1, {ContractionMap::affine(Mat::Constant(1, 1, -0.4), make_vec({0.1}))});
  auto const m1 = mean_value_check(F1, Word{{0}}, Ball(make_vec({0.2}), 0.3));
  EXPECT_NEAR(m1.ratio, 0.4, 1e-12);
  EXPECT_NEAR(m1.dmin, 0.4, 1e-12);
  EXPECT_NEAR(m1.dmax, 0.4, 1e-12);
  EXPECT_TRUE(m1.pass);

  auto const F2 = diag_single();
  auto const m2 = mean_value_check(F2, Word{{0}}, Ball(make_vec({0.0, 0.1}), 0.5));
  EXPECT_NEAR(m2.ratio, 0.5, 1e-12);
  EXPECT_GE(m2.ratio, m2.dmin - 1e-12);
  EXPECT_TRUE(m2.pass);
}

TEST(MeanValue, PerturbedRandomBalls)
{
  std::mt19937_64 rng(6);
  for (int i = 0; i < 50; ++i)
  {
    auto const F = i % 2 ? perturbed_2d() : perturbed_1d();
    double const r = std::uniform_real_distribution<double>(0.05, 0.4)(rng);
    Ball const A(random_in_ball(rng, F.dim(), 1.0 - r), r);
    EXPECT_TRUE(mean_value_check(F, random_word(rng, F, 1, 3), A).pass);
  }
}

TEST(Conformality, Verdicts)
{
  EXPECT_EQ(semi_conformality_diagnostic(make_three_branch(0.1), 5).verdict,
            Conformality::conformal);
  EXPECT_EQ(semi_conformality_diagnostic(conformal_2d(), 5).verdict, Conformality::conformal);
  EXPECT_EQ(semi_conformality_diagnostic(diag_single(), 8).verdict, Conformality::flat_positive);
  EXPECT_EQ(to_string(Conformality::flat_positive), "FLAT-POSITIVE");
  EXPECT_THROW(semi_conformality_diagnostic(diag_single(), 1), domain_error);
}

TEST(NormSandwich, Residual)
{
  Mat J(2, 2);
  J << 0.3, 0.1, -0.2, 0.25;
  EXPECT_LE(norm_sandwich_residual(J, make_vec({0.6, 0.8})), 1e-15);
}

TEST(DirectionTransfer, IdentityHolds)
{
  auto const F = perturbed_2d();
  auto const c = direction_transfer_check(F, Word{{0, 1, 1}}, make_vec({0.2, 0.1}),
                                          make_vec({-0.4, 0.5}), make_vec({1.0, 0.0}));
  EXPECT_NEAR(c.ratio, c.expected, 1e-12);
}

TEST(Suites, DistortionSuitePasses)
{
  auto const r = suite_distortion(7);
  EXPECT_TRUE(r.pass()) << to_json(r).dump();
  EXPECT_EQ(r.stats["distortion_bound_passes"].get<int>(), 100);
  EXPECT_EQ(r.stats["scaling_passes"].get<int>(), 100);
}
