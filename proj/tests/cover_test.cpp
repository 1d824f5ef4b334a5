#include "lsf/families.hpp"
#include "lsf/suites.hpp"

#include <gtest/gtest.h>

#include <set>

using namespace lsf;
using namespace lsf::testkit;

TEST(ContractionConstants, FamilySlopes)
{
  auto const c = contraction_constants(make_three_branch(0.3));
  EXPECT_NEAR(c.k, std::log(3.0) - std::log(1.01), 1e-15);
  EXPECT_NEAR(c.K, std::log(3.0) + std::log(1.01), 1e-15);
}

TEST(ContractionConstants, DiagonalAndConformal)
{
  auto const d = contraction_constants(diag_single());
  EXPECT_NEAR(d.k, std::log(2.0) - std::log(1.01), 1e-15);
  EXPECT_NEAR(d.K, std::log(4.0) + std::log(1.01), 1e-15);
  auto const c = contraction_constants(conformal_2d(), 1.0);
  EXPECT_NEAR(c.k, std::log(3.0), 1e-12);
  EXPECT_NEAR(c.K, std::log(3.0), 1e-12);
  EXPECT_LE(c.k, c.K);
  EXPECT_THROW(contraction_constants(diag_single(), 0.9), domain_error);
}

TEST(ContractionConstants, StrictInequalitiesOnSamples)
{
  auto const F = perturbed_2d();
  auto const c = contraction_constants(F);
  for (auto const &x : ball_net(2, 0.1))
    for (auto const &f : F.maps())
    {
      Mat const J = f.jacobian(x);
      EXPECT_LT(sigma_max(J), std::exp(-c.k));
      EXPECT_GT(sigma_min(J), std::exp(-c.K));
    }
}

TEST(ImageDiameter, ExactCases)
{
  auto const F = make_three_branch(0.4);
  for (int m = 0; m <= 5; ++m)
  {
    Word w;
    w.indices.assign(m, 1);
    auto const d = image_diameter(F, w);
    EXPECT_DOUBLE_EQ(d.hi, 2.0 * std::pow(3.0, -m));
    EXPECT_EQ(d.lo, d.hi);
  }
  auto const D = diag_single();
  for (int m = 1; m <= 5; ++m)
  {
    Word w;
    w.indices.assign(m, 0);
    EXPECT_DOUBLE_EQ(image_diameter(D, w).hi, 2.0 * std::pow(2.0, -m));
  }
}

TEST(ImageDiameter, PerturbedBracketContainsSampledDiameter)
{
  auto const F = perturbed_2d();
  Word const w{{0, 1}};
  auto const d = image_diameter(F, w);
  auto const g = compose(F, w);
  double sampled = 0.0;
  auto const pts = sphere_net(2, 0.01);
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j)
      sampled = std::max(sampled, (g.eval(pts[i]) - g.eval(pts[j])).norm());
  EXPECT_LE(d.lo, sampled + 1e-12);
  EXPECT_GE(d.hi, sampled - 1e-12);
}

TEST(DynamicCover, CantorZeroSlackLevelThree)
{
  auto const F = make_three_branch(0.0);
  auto const cov = build_dynamic_cover(F, 3, contraction_constants(F, 1.0), 0.0, 0.0);
  ASSERT_EQ(cov.words.size(), 81u);
  for (auto const &w : cov.words)
  {
    EXPECT_EQ(w.word.length(), 4u);
    EXPECT_NEAR(w.hi, 2.0 * std::pow(3.0, -4), 1e-16);
  }
  EXPECT_TRUE(cov.lower_violations.empty());
  EXPECT_TRUE(std::is_sorted(cov.words.begin(), cov.words.end(),
                             [](auto const &a, auto const &b) { return a.word < b.word; }));
  auto const sel = maximal_disjoint(F, cov);
  EXPECT_EQ(sel.N, 16u);
  EXPECT_TRUE(sel.ambiguous.empty());
  EXPECT_TRUE(sel.maximal);
}

TEST(DynamicCover, SingleMapGivesOneWord)
{
  System const F(1, {ContractionMap::affine(Mat::Constant(1, 1, 0.5), make_vec({0.0}))});
  auto const cov = build_dynamic_cover(F, 2, contraction_constants(F, 1.0), 0.0, 0.0);
  ASSERT_EQ(cov.words.size(), 1u);
  EXPECT_EQ(cov.words[0].word.length(), 3u);
  EXPECT_EQ(maximal_disjoint(F, cov).N, 1u);
}

TEST(DynamicCover, SlackedCoversRespectTheWindow)
{
  for (auto const &cc : cover_cases())
  {
    auto const cov = build_dynamic_cover(cc.F, cc.n, contraction_constants(cc.F));
    EXPECT_TRUE(cov.window_holds()) << cc.name;
    EXPECT_LE(cov.max_length(), static_cast<std::size_t>(cc.n)) << cc.name;
    for (auto const &w : cov.words)
    {
      EXPECT_LT(w.hi, cov.window_hi) << cc.name;
      EXPECT_GE(w.lo, cov.window_lo * (1.0 - 1e-12)) << cc.name;
    }
  }
}

TEST(DynamicCover, FrontierCap)
{
  auto const F = make_three_branch(0.3);
  EXPECT_THROW(build_dynamic_cover(F, 8, contraction_constants(F), 0.0, 0.0, 100), cap_error);
  EXPECT_THROW(build_dynamic_cover(F, 0, contraction_constants(F), 0.0, 0.0), domain_error);
}

TEST(DynamicCover, CoversTheAttractor)
{
  for (double t : {0.0, 0.25, 0.5})
  {
    auto const F = make_three_branch(t);
    auto const cov = build_dynamic_cover(F, 4, contraction_constants(F));
    double const tol = 2.0 * GridSet(1, 12, {}).diagonal();
    auto const att = attractor(F, tol, 12);
    EXPECT_EQ(cover_misses(F, cov, att.grid, att.hd_bound + att.grid.diagonal()), 0u);
  }
}

TEST(Disjoint, OverlappingMiddleBranch)
{
  // At t = 1/2 the middle branch overlaps, so N_n < number of words.
  auto const F = make_three_branch(0.5);
  auto const cov = build_dynamic_cover(F, 3, contraction_constants(F, 1.0), 0.0, 0.0);
  auto const sel = maximal_disjoint(F, cov);
  EXPECT_LT(sel.N, cov.words.size());
  EXPECT_TRUE(sel.maximal);
  // Selected images are pairwise disjoint intervals (touching allowed in
  // the open reading).
  std::vector<std::pair<double, double>> iv;
  for (auto i : sel.selected)
  {
    auto const g = compose(F, cov.words[i].word);
    double const a = g.eval(make_vec({-1.0}))(0), b = g.eval(make_vec({1.0}))(0);
    iv.emplace_back(std::min(a, b), std::max(a, b));
  }
  std::sort(iv.begin(), iv.end());
  for (std::size_t i = 1; i < iv.size(); ++i)
    EXPECT_LE(iv[i - 1].second, iv[i].first + touch_tol);
}

TEST(Disjoint, ClosedReadingIsStricter)
{
  auto const F = make_full_interval();
  auto const cov = build_dynamic_cover(F, 3, contraction_constants(F, 1.0), 0.0, 0.0);
  auto const open = maximal_disjoint(F, cov, Reading::open);
  auto const closed = maximal_disjoint(F, cov, Reading::closed);
  EXPECT_EQ(open.N, cov.words.size());
  EXPECT_LT(closed.N, open.N);
}

TEST(Disjoint, EllipsoidOverlapValue)
{
  // Unit disks at distance 3 are disjoint (negative), at distance 1 they
  // overlap (positive), at distance 2 they touch.
  Mat const P = Mat::Identity(2, 2);
  EXPECT_LT(detail::ellipsoid_overlap_value(P, P, make_vec({3.0, 0.0})), -1e-10);
  EXPECT_GT(detail::ellipsoid_overlap_value(P, P, make_vec({1.0, 0.0})), 1e-10);
  EXPECT_NEAR(detail::ellipsoid_overlap_value(P, P, make_vec({2.0, 0.0})), 0.0, 1e-10);
}

TEST(Disjoint, TwoDimensionalSelectionIsPairwiseDisjoint)
{
  auto const F = conformal_2d();
  auto const cov = build_dynamic_cover(F, 3, contraction_constants(F));
  auto const sel = maximal_disjoint(F, cov);
  ASSERT_GT(sel.N, 0u);
  // Sampled check: no sampled point of one selected image lies inside another.
  std::vector<ComposedMap> gs;
  for (auto i : sel.selected)
    gs.push_back(compose(F, cov.words[i].word));
  auto const net = ball_net(2, 0.2);
  for (std::size_t a = 0; a < gs.size(); ++a)
    for (std::size_t b = 0; b < gs.size(); ++b)
    {
      if (a == b)
        continue;
      Mat const inv = gs[b].matrix().inverse();
      for (auto const &x : net)
        EXPECT_GE((inv * (gs[a].eval(x) - gs[b].translation())).norm(), 1.0 - 1e-9);
    }
}

TEST(InflatedBalls, InequalityHoldsForEveryMember)
{
  for (auto const &cc : cover_cases())
  {
    auto const rep = distortion_report(cc.F, cc.n);
    auto const cov = build_dynamic_cover(cc.F, cc.n, contraction_constants(cc.F), rep.Q_at(cc.n),
                                         rep.D_at(cc.n));
    auto const sel = maximal_disjoint(cc.F, cov);
    auto const ib = inflated_ball_check(cov, sel);
    EXPECT_EQ(ib.failures, 0u) << cc.name;
    EXPECT_EQ(ib.checked, sel.selected.size()) << cc.name;
    EXPECT_LE(ib.worst_ratio, 1.0) << cc.name;
  }
}

TEST(Osc, CantorIsCertified)
{
  auto const F = make_cantor();
  auto const r = check_osc(F, Box{make_vec({-1.0}), make_vec({1.0})});
  EXPECT_TRUE(r.certified);
  EXPECT_TRUE(r.closure_disjoint);
  EXPECT_NEAR(r.min_margin, 2.0 / 3, 1e-6);
}

TEST(Osc, HalfParameterSharesAnEndpoint)
{
  // Natural V slightly larger than [0, 1/2] still fails between f_0 and f_1.
  auto const F = make_three_branch(0.5);
  auto const fr = unit_frame();
  Box const V{make_vec({fr.to_normalized(-0.01)}), make_vec({fr.to_normalized(0.51)})};
  auto const r = check_osc(F, V);
  EXPECT_FALSE(r.certified);
  EXPECT_EQ(r.witness_i, 0);
  EXPECT_EQ(r.witness_j, 1);
}

TEST(Osc, GLambdaOneFifthTouchesInClosure)
{
  auto const F = make_g_lambda(0.2);
  auto const r = check_osc(F, Box{make_vec({-1.0}), make_vec({1.0})});
  EXPECT_TRUE(r.certified);
  EXPECT_FALSE(r.closure_disjoint);
}

TEST(Osc, BoxMustContainTheAttractor)
{
  auto const F = make_cantor();
  EXPECT_THROW(check_osc(F, Box{make_vec({-0.5}), make_vec({0.5})}), precondition_error);
}

TEST(Osc, TwoDimensionalSimilarity)
{
  auto const F = System(2, {ContractionMap::affine(Mat::Identity(2, 2) / 3, make_vec({-0.6, 0.0})),
                            ContractionMap::affine(Mat::Identity(2, 2) / 3, make_vec({0.6, 0.0}))});
  Box const V{make_vec({-0.95, -0.6}), make_vec({0.95, 0.6})};
  EXPECT_TRUE(check_osc(F, V).certified);
}

TEST(Suites, CoverSuitePasses)
{
  auto const r = suite_cover(1);
  EXPECT_TRUE(r.pass()) << to_json(r).dump();
}

TEST(Osc, ImagesMustStayInsideV)
{
  // A square rotated by 45 degrees and scaled by 0.8 pokes out of itself.
  System const F(2, {ContractionMap::affine(rotation2(M_PI / 4) * 0.8, make_vec({0.0, 0.0}))});
  Box const V{make_vec({-0.5, -0.5}), make_vec({0.5, 0.5})};
  auto const r = check_osc(F, V);
  EXPECT_FALSE(r.invariant);
  EXPECT_FALSE(r.certified);
  EXPECT_EQ(r.witness_i, 0);
  EXPECT_EQ(r.witness_j, 0);
}
