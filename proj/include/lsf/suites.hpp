#pragma once

// Randomized property suites over all modules; shared by the CLI `verify`
// command and the acceptance runner.

#include "lsf/io.hpp"

#include <functional>

namespace lsf
{

struct SuiteResult
{
  std::string name;
  std::size_t checks = 0;
  std::size_t failures = 0;
  std::vector<std::string> notes;  // first few failure descriptions
  json stats = json::object();

  void expect(bool ok, std::string const &what)
  {
    ++checks;
    if (!ok)
    {
      ++failures;
      if (notes.size() < 20)
        notes.push_back(what);
    }
  }

  bool pass() const { return failures == 0; }
};

inline json to_json(SuiteResult const &r)
{
  return {{"suite", r.name},
          {"checks", r.checks},
          {"failures", r.failures},
          {"pass", r.pass()},
          {"notes", r.notes},
          {"stats", r.stats}};
}

namespace testkit
{

inline PointCloud random_cloud(std::mt19937_64 &rng, int dim, std::size_t count)
{
  std::vector<Vec> pts;
  for (std::size_t i = 0; i < count; ++i)
    pts.push_back(random_in_ball(rng, dim));
  return PointCloud(dim, std::move(pts), 1e-12);
}

inline Mat rotation2(double th)
{
  Mat R(2, 2);
  R << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
  return R;
}

inline Mat diag(std::initializer_list<double> d)
{
  Vec v = make_vec(d);
  return Mat(v.asDiagonal());
}

/// Affine map with the given linear part and a random translation keeping
/// the ball inside itself.
inline ContractionMap random_affine(std::mt19937_64 &rng, Mat const &A)
{
  double const room = 1.0 - sigma_max(A);
  return ContractionMap::affine(A, random_in_ball(rng, static_cast<int>(A.rows()), room * 0.95));
}

inline Mat random_linear(std::mt19937_64 &rng, int dim, double smin, double smax)
{
  std::uniform_real_distribution<double> u(smin, smax);
  if (dim == 1)
    return Mat::Constant(1, 1, u(rng) * (u(rng) < 0.5 * (smin + smax) ? -1.0 : 1.0));
  std::uniform_real_distribution<double> ang(0.0, 2.0 * M_PI);
  if (dim == 2)
    return rotation2(ang(rng)) * diag({u(rng), u(rng)}) * rotation2(ang(rng));
  // Orthogonal factors from QR of Gaussian matrices drawn from rng (Eigen's
  // own Random() uses the global std::rand and breaks reproducibility).
  std::normal_distribution<double> g(0.0, 1.0);
  auto orthogonal = [&] {
    Eigen::Matrix3d M;
    for (int i = 0; i < 9; ++i)
      M(i / 3, i % 3) = g(rng);
    return Eigen::Matrix3d(Eigen::HouseholderQR<Eigen::Matrix3d>(M).householderQ());
  };
  Eigen::Matrix3d const Qm = orthogonal();
  Eigen::Matrix3d const Pm = orthogonal();
  Vec s = make_vec({u(rng), u(rng), u(rng)});
  return Mat(Qm * Eigen::Matrix3d(Eigen::Vector3d(s(0), s(1), s(2)).asDiagonal()) * Pm);
}

inline System random_affine_system(std::mt19937_64 &rng, int dim, int maps, double smin,
                                   double smax)
{
  std::vector<ContractionMap> fs;
  for (int i = 0; i < maps; ++i)
    fs.push_back(random_affine(rng, random_linear(rng, dim, smin, smax)));
  return System(dim, std::move(fs));
}

/// Coefficients moved by up to delta, containment preserved by shrinking
/// the translation when needed.
inline System perturb_affine(std::mt19937_64 &rng, System const &F, double delta)
{
  std::uniform_real_distribution<double> u(-delta, delta);
  std::vector<ContractionMap> fs;
  for (auto const &f : F.maps())
  {
    Mat A = f.matrix();
    Vec b = f.translation();
    for (int i = 0; i < A.rows(); ++i)
    {
      b(i) += u(rng);
      for (int j = 0; j < A.cols(); ++j)
        A(i, j) += u(rng);
    }
    double const room = 1.0 - sigma_max(A);
    if (b.norm() > room)
      b *= room / b.norm();
    fs.push_back(ContractionMap::affine(A, b));
  }
  return System(F.dim(), std::move(fs));
}

/// x/3 + 0.02 x^2 shifted by -0.6, 0, 0.6.
inline System perturbed_1d()
{
  std::vector<ContractionMap> fs;
  for (double s : {-0.6, 0.0, 0.6})
    fs.push_back(ContractionMap::perturbed(Mat::Constant(1, 1, 1.0 / 3), make_vec({s}),
                                           {PolyTerm{{2, 0, 0}, make_vec({0.02})}}));
  return System(1, std::move(fs));
}

/// The single map x/3 + 0.02 x^2.
inline System perturbed_1d_single()
{
  return System(1, {ContractionMap::perturbed(Mat::Constant(1, 1, 1.0 / 3), make_vec({0.0}),
                                              {PolyTerm{{2, 0, 0}, make_vec({0.02})}})});
}

inline System perturbed_2d()
{
  std::vector<ContractionMap> fs;
  fs.push_back(ContractionMap::perturbed(
      diag({0.4, 0.3}), make_vec({-0.45, 0.1}),
      {PolyTerm{{2, 0, 0}, make_vec({0.0, 0.03})}, PolyTerm{{1, 1, 0}, make_vec({0.02, 0.0})}}));
  fs.push_back(ContractionMap::perturbed(
      rotation2(0.5) * diag({0.35, 0.3}), make_vec({0.4, -0.2}),
      {PolyTerm{{0, 2, 0}, make_vec({0.025, 0.0})}}));
  return System(2, std::move(fs));
}

/// diag(1/2, 1/4) alone.
inline System diag_single()
{
  return System(2, {ContractionMap::affine(diag({0.5, 0.25}), make_vec({0.0, 0.0}))});
}

/// diag(1/2, 1/4) and diag(1/4, 1/2), translated apart.
inline System diag_pair()
{
  return System(2, {ContractionMap::affine(diag({0.5, 0.25}), make_vec({-0.45, 0.0})),
                    ContractionMap::affine(diag({0.25, 0.5}), make_vec({0.45, 0.0}))});
}

/// Rotations by 0.7 and -1.1 scaled by 1/3.
inline System conformal_2d()
{
  return System(2, {ContractionMap::affine(rotation2(0.7) / 3.0, make_vec({-0.5, 0.1})),
                    ContractionMap::affine(rotation2(-1.1) / 3.0, make_vec({0.5, -0.1})),
                    ContractionMap::affine(rotation2(2.0) / 3.0, make_vec({0.0, 0.55}))});
}

inline Word random_word(std::mt19937_64 &rng, System const &F, int min_len, int max_len)
{
  std::uniform_int_distribution<int> len(min_len, max_len);
  return detail::random_word(rng, F.size(), len(rng));
}

} // namespace testkit

/// Metric axioms, union subadditivity, neighborhood nesting.
inline SuiteResult suite_metric(std::uint64_t seed)
{
  SuiteResult r;
  r.name = "metric";
  std::mt19937_64 rng(seed);
  for (int dim = 1; dim <= 3; ++dim)
    for (int trial = 0; trial < 20; ++trial)
    {
      auto const A = testkit::random_cloud(rng, dim, 5 + trial);
      auto const B = testkit::random_cloud(rng, dim, 7 + trial);
      auto const C = testkit::random_cloud(rng, dim, 3 + trial);
      double const ab = hausdorff_distance(A, B).value;
      double const ba = hausdorff_distance(B, A).value;
      double const bc = hausdorff_distance(B, C).value;
      double const ac = hausdorff_distance(A, C).value;
      r.expect(ab == ba, "Hd symmetry");
      r.expect(ac <= ab + bc + 1e-12, "Hd triangle inequality");
      r.expect(hausdorff_distance(A, A).value == 0.0, "Hd identity");
      r.expect(ab >= 0.0, "Hd nonnegative");
    }
  // Union subadditivity on clouds (3 parts, dim 2) and on grids.
  for (int trial = 0; trial < 20; ++trial)
  {
    std::vector<PointCloud> pa, pb;
    for (int i = 0; i < 3; ++i)
    {
      pa.push_back(testkit::random_cloud(rng, 2, 6));
      pb.push_back(testkit::random_cloud(rng, 2, 4));
    }
    auto const res = union_subadditivity_check(std::span<PointCloud const>(pa),
                                               std::span<PointCloud const>(pb));
    r.expect(res.value <= res.uncertainty + 1e-12, "union subadditivity (clouds)");
  }
  for (int trial = 0; trial < 10; ++trial)
  {
    std::vector<GridSet> ga, gb;
    for (int i = 0; i < 3; ++i)
    {
      auto ca = testkit::random_cloud(rng, 2, 20);
      auto cb = testkit::random_cloud(rng, 2, 15);
      ga.push_back(GridSet::from_points(2, 6, ca.points));
      gb.push_back(GridSet::from_points(2, 6, cb.points));
    }
    auto const res = union_subadditivity_check(std::span<GridSet const>(ga),
                                               std::span<GridSet const>(gb));
    r.expect(res.value <= res.uncertainty + 1e-12, "union subadditivity (grids)");
  }
  // Neighborhood monotonicity and nesting.
  for (int dim = 1; dim <= 3; ++dim)
    for (int trial = 0; trial < 5; ++trial)
    {
      int const level = dim == 1 ? 9 : (dim == 2 ? 6 : 4);
      auto const cloud = testkit::random_cloud(rng, dim, 6);
      auto const A = GridSet::from_points(dim, level, cloud.points);
      std::uniform_real_distribution<double> u(0.02, 0.2);
      double const e1 = u(rng), e2 = u(rng);
      auto const n1 = epsilon_neighborhood(A, e1);
      auto const n12 = epsilon_neighborhood(n1, e2);
      auto const nsum = epsilon_neighborhood(A, e1 + e2);
      r.expect(std::includes(nsum.cells().begin(), nsum.cells().end(), n12.cells().begin(),
                             n12.cells().end()),
               "N(A,e1+e2) contains N(N(A,e1),e2)");
      r.expect(std::includes(n1.cells().begin(), n1.cells().end(), A.cells().begin(),
                             A.cells().end()),
               "A inside N(A,e)");
      auto const small = epsilon_neighborhood(A, 0.5 * e1);
      r.expect(std::includes(n1.cells().begin(), n1.cells().end(), small.cells().begin(),
                             small.cells().end()),
               "neighborhoods nested in eps");
    }
  return r;
}

/// Hutchinson contraction, attractor fixed point, continuity of attractors
/// in d0, chain rule.
inline SuiteResult suite_contraction(std::uint64_t seed)
{
  SuiteResult r;
  r.name = "contraction";
  std::mt19937_64 rng(seed);
  for (int dim = 1; dim <= 3; ++dim)
    for (int trial = 0; trial < 10; ++trial)
    {
      auto const F = testkit::random_affine_system(rng, dim, 3, 0.2, 0.5);
      auto const A = testkit::random_cloud(rng, dim, 8);
      auto const B = testkit::random_cloud(rng, dim, 9);
      double const lhs = hausdorff_distance(hutchinson(F, A), hutchinson(F, B)).value;
      double const rhs = F.lipschitz() * hausdorff_distance(A, B).value;
      r.expect(lhs <= rhs + 1e-12, "Hutchinson contraction on clouds");
    }
  {
    auto const F = testkit::perturbed_2d();
    for (int trial = 0; trial < 10; ++trial)
    {
      auto const A = testkit::random_cloud(rng, 2, 8);
      auto const B = testkit::random_cloud(rng, 2, 9);
      double const lhs = hausdorff_distance(hutchinson(F, A), hutchinson(F, B)).value;
      double const rhs = F.lipschitz() * hausdorff_distance(A, B).value;
      r.expect(lhs <= rhs + 1e-12, "Hutchinson contraction (perturbed maps)");
    }
  }

  // Fixed-point residual of computed attractors.
  for (auto const &F : {make_three_branch(0.5), make_three_branch(0.25), make_cantor(),
                        testkit::conformal_2d()})
  {
    int const level = F.dim() == 1 ? 12 : 7;
    GridSet const shape(F.dim(), level, {});
    double const tol = 2.0 * shape.diagonal();
    auto const att = attractor(F, tol, level);
    auto const img = hutchinson(F, att.grid);
    auto const hd = hausdorff_distance(img, att.grid);
    r.expect(hd.value <= 2.0 * tol + hd.uncertainty + att.hd_bound, "attractor fixed point");
  }

  // Attractor continuity: Hd(L(F), L(G)) <= d0/(1-L) + slack.
  int pairs = 0;
  double worst = -std::numeric_limits<double>::infinity();
  for (int trial = 0; trial < 24; ++trial)
  {
    int const dim = trial < 16 ? 1 : 2;
    int const level = dim == 1 ? 12 : 7;
    auto const F = testkit::random_affine_system(rng, dim, dim == 1 ? 2 : 3, 0.2, 0.45);
    auto const G = testkit::perturb_affine(rng, F, 0.02);
    GridSet const shape(dim, level, {});
    double const tol = 2.0 * shape.diagonal();
    auto const aF = attractor(F, tol, level);
    auto const aG = attractor(G, tol, level);
    auto const d0 = d0_distance(F, G, ball_sample(dim, dim == 1 ? 1e-3 : 0.02));
    auto const hd = hausdorff_distance(aF.grid, aG.grid);
    double const L = std::max(F.lipschitz(), G.lipschitz());
    double const bound = (d0.value + d0.uncertainty) / (1.0 - L);
    double const slack = aF.hd_bound + aG.hd_bound + hd.uncertainty;
    worst = std::max(worst, hd.value - bound - slack);
    r.expect(hd.value <= bound + slack, "attractor continuity bound");
    ++pairs;
  }
  r.stats["continuity_pairs"] = pairs;
  r.stats["continuity_worst_margin"] = worst;

  // Chain rule against central differences.
  {
    auto const P1 = testkit::perturbed_1d();
    auto const P2 = testkit::perturbed_2d();
    double worst_rel = 0.0;
    for (int trial = 0; trial < 100; ++trial)
    {
      auto const &F = trial % 2 ? P2 : P1;
      auto const w = testkit::random_word(rng, F, 1, 4);
      auto const g = compose(F, w);
      Vec const x = random_in_ball(rng, F.dim(), 0.9);
      Mat const J = g.jacobian(x);
      Mat fd(F.dim(), F.dim());
      double const h = 1e-5;
      for (int j = 0; j < F.dim(); ++j)
      {
        Vec e = Vec::Zero(F.dim());
        e(j) = h;
        fd.col(j) = (g.eval(x + e) - g.eval(x - e)) / (2.0 * h);
      }
      double const rel = (J - fd).norm() / J.norm();
      worst_rel = std::max(worst_rel, rel);
      r.expect(rel <= 1e-6, "chain rule vs finite differences");
    }
    r.stats["chain_rule_worst_rel"] = worst_rel;
  }
  return r;
}

/// Distortion calculus on affine, perturbed and non-conformal systems.
inline SuiteResult suite_distortion(std::uint64_t seed)
{
  SuiteResult r;
  r.name = "distortion";
  std::mt19937_64 rng(seed);

  // Affine: D(n) = 0 and C_n = Id.
  std::vector<System> affine{make_three_branch(0.3), testkit::diag_pair(), testkit::conformal_2d(),
                             testkit::random_affine_system(rng, 3, 2, 0.2, 0.5)};
  double worst_id = 0.0;
  for (int trial = 0; trial < 1000; ++trial)
  {
    auto const &F = affine[trial % affine.size()];
    auto const w = testkit::random_word(rng, F, 1, 10);
    Vec const x0 = random_in_ball(rng, F.dim()), y0 = random_in_ball(rng, F.dim());
    Mat const C = C_matrix(F, w, x0, y0);
    double const err = (C - Mat::Identity(F.dim(), F.dim())).cwiseAbs().maxCoeff();
    worst_id = std::max(worst_id, err);
    r.expect(err <= 1e-12, "affine C_n = Id");
  }
  r.stats["affine_C_worst"] = worst_id;
  for (auto const &F : affine)
  {
    auto const d = D_of_n(F, 10);
    r.expect(std::all_of(d.D.begin(), d.D.end(), [](double v) { return v == 0.0; }),
             "affine D(n) = 0");
  }

  // Distortion bound for x/3 + 0.02x^2 systems.
  {
    std::size_t passes = 0;
    auto const P = testkit::perturbed_1d();
    auto const rep = Q_of_n(P, 10);
    for (int trial = 0; trial < 100; ++trial)
    {
      auto const w = testkit::random_word(rng, P, 1, 10);
      Vec const x0 = random_in_ball(rng, 1), y0 = random_in_ball(rng, 1);
      auto const tr = make_trace(P, w, x0, y0);
      auto const chk = verify_distortion_bound(P, tr, make_vec({1.0}), rep);
      passes += chk.pass;
      r.expect(chk.pass, "distortion bound (1-D perturbed)");
    }
    r.stats["distortion_bound_passes"] = passes;
    auto const P2 = testkit::perturbed_2d();
    Sampling s;
    s.seed = seed;
    auto const rep2 = Q_of_n(P2, 6, s);
    for (int trial = 0; trial < 40; ++trial)
    {
      auto const w = testkit::random_word(rng, P2, 1, 6);
      Vec const x0 = random_in_ball(rng, 2), y0 = random_in_ball(rng, 2);
      auto const tr = make_trace(P2, w, x0, y0);
      auto const chk = verify_distortion_bound(P2, tr, random_unit(rng, 2), rep2);
      r.expect(chk.pass, "distortion bound (2-D perturbed)");
    }
  }

  // Scaling bound on the diag(1/2,1/4) systems with exhaustive Q, D.
  {
    std::size_t passes = 0;
    std::vector<System> sys{testkit::diag_single(), testkit::diag_pair()};
    std::vector<DistortionReport> reps;
    for (auto const &F : sys)
      reps.push_back(distortion_report(F, 6));
    for (int trial = 0; trial < 100; ++trial)
    {
      std::size_t const which = trial % 2;
      auto const &F = sys[which];
      auto const &rep = reps[which];
      bool const exh = std::all_of(rep.exhaustive_Q.begin(), rep.exhaustive_Q.end(),
                                   [](bool b) { return b; });
      r.expect(exh, "Q exhaustive for the scaling check");
      auto const wa = testkit::random_word(rng, F, 1, 6);
      auto const wb = testkit::random_word(rng, F, 1, 6);
      std::uniform_real_distribution<double> rad(0.05, 0.5);
      double const radius = rad(rng);
      Ball const B(random_in_ball(rng, 2, 1.0 - radius), radius);
      auto const chk = verify_scaling(F, wa, wb, B, rep);
      passes += chk.pass;
      r.expect(chk.pass, "scaling bound");
    }
    r.stats["scaling_passes"] = passes;
  }

  // Inversion identity, norm sandwich, direction transfer, cross gains.
  {
    std::vector<System> sys{testkit::perturbed_1d(), testkit::perturbed_2d(), testkit::diag_pair()};
    std::vector<DistortionReport> reps;
    for (auto const &F : sys)
      reps.push_back(distortion_report(F, 4));
    for (int trial = 0; trial < 150; ++trial)
    {
      std::size_t const which = trial % sys.size();
      auto const &F = sys[which];
      auto const w = testkit::random_word(rng, F, 1, 4);
      Vec const x0 = random_in_ball(rng, F.dim()), y0 = random_in_ball(rng, F.dim());
      Mat const Cxy = C_matrix(F, w, x0, y0), Cyx = C_matrix(F, w, y0, x0);
      r.expect((Cxy * Cyx - Mat::Identity(F.dim(), F.dim())).norm() <= 1e-10,
               "C inversion identity");
      Vec const v = random_unit(rng, F.dim()), u = random_unit(rng, F.dim());
      r.expect(norm_sandwich_residual(compose(F, w).jacobian(x0), v) <= 1e-12, "norm sandwich");
      auto const tc = direction_transfer_check(F, w, x0, y0, v);
      r.expect(std::abs(tc.ratio - tc.expected) <= 1e-10 * std::max(1.0, tc.expected),
               "direction transfer identity");
      auto const &rep = reps[which];
      int const n = static_cast<int>(w.length());
      if (F.is_affine())
      {
        r.expect(tc.log_gain <= rep.D_at(n) + 1e-12, "transfer gain within D(n)");
        r.expect(cross_gain_log(F, w, x0, y0, u, v) <= rep.D_at(n) + rep.Q_at(n) + 1e-12,
                 "cross gain within D(n) + Q(n)");
      }
      else
      {
        // Sampled sups: compare with the net slack of the report.
        double const slack = rep.net_slack * (n + 1) + 1e-9;
        r.expect(tc.log_gain <= rep.D_at(n) + slack, "transfer gain within D(n) (sampled)");
        r.expect(cross_gain_log(F, w, x0, y0, u, v) <= rep.D_at(n) + rep.Q_at(n) + 2.0 * slack,
                 "cross gain within D(n) + Q(n) (sampled)");
      }
    }
  }

  // Mean value inequality: perturbed maps on random balls.
  for (int trial = 0; trial < 50; ++trial)
  {
    auto const F = trial % 2 ? testkit::perturbed_2d() : testkit::perturbed_1d();
    auto const w = testkit::random_word(rng, F, 1, 3);
    std::uniform_real_distribution<double> rad(0.05, 0.4);
    double const radius = rad(rng);
    Ball const A(random_in_ball(rng, F.dim(), 1.0 - radius), radius);
    r.expect(mean_value_check(F, w, A).pass, "mean value bracket");
  }

  // Conformality verdicts.
  r.expect(semi_conformality_diagnostic(make_three_branch(0.2), 6).verdict == Conformality::conformal,
           "1-D system conformal");
  r.expect(semi_conformality_diagnostic(testkit::conformal_2d(), 6).verdict ==
               Conformality::conformal,
           "rotation system conformal");
  r.expect(semi_conformality_diagnostic(testkit::diag_single(), 8).verdict ==
               Conformality::flat_positive,
           "diag(1/2,1/4) flat positive");
  return r;
}

struct CoverCase
{
  std::string name;
  System F;
  int n;
};

inline std::vector<CoverCase> cover_cases()
{
  return {{"F_0", make_three_branch(0.0), 5},        {"F_1/2", make_three_branch(0.5), 5},
          {"F_1/4", make_three_branch(0.25), 6},     {"cantor", make_cantor(), 7},
          {"G_1/5", make_g_lambda(0.2), 5},          {"full_interval", make_full_interval(), 8},
          {"conformal_2d", testkit::conformal_2d(), 4}, {"diag_pair", testkit::diag_pair(), 5},
          {"perturbed_1d", testkit::perturbed_1d(), 4}};
}

/// Dynamic-cover window, word lengths, inflated balls, containment.
inline SuiteResult suite_cover(std::uint64_t seed)
{
  SuiteResult r;
  r.name = "cover";
  (void)seed;
  {
    auto const F0 = make_three_branch(0.0);
    auto const c = contraction_constants(F0, 1.0);
    auto const cov = build_dynamic_cover(F0, 3, c, 0.0, 0.0);
    bool all4 = cov.words.size() == 81;
    for (auto const &w : cov.words)
      all4 = all4 && w.word.length() == 4 &&
             std::abs(w.hi - 2.0 * std::pow(3.0, -4)) <= 1e-15;
    r.expect(all4, "F_0 n=3 zero slack: 81 words of length 4");
    auto const sel = maximal_disjoint(F0, cov);
    r.expect(sel.N == 16, "F_0 n=3: N_3 = 16");
    r.expect(cov.lower_violations.empty(), "F_0 n=3 lower window");
    auto const ib = inflated_ball_check(cov, sel);
    r.expect(ib.failures == 0, "F_0 n=3 inflated balls");
  }
  json per = json::array();
  for (auto const &cc : cover_cases())
  {
    auto const c = contraction_constants(cc.F, 1.01);
    auto const rep = distortion_report(cc.F, cc.n);
    auto const cov = build_dynamic_cover(cc.F, cc.n, c, rep.Q_at(cc.n), rep.D_at(cc.n));
    auto const sel = maximal_disjoint(cc.F, cov);
    r.expect(cov.window_holds(), cc.name + ": diameter window");
    r.expect(cov.max_length() <= static_cast<std::size_t>(cc.n), cc.name + ": word length <= n");
    auto const ib = inflated_ball_check(cov, sel);
    r.expect(ib.failures == 0, cc.name + ": inflated balls");
    r.expect(sel.maximal, cc.name + ": greedy maximality");
    int const level = cc.F.dim() == 1 ? 12 : 7;
    GridSet const shape(cc.F.dim(), level, {});
    auto const att = attractor(cc.F, 2.0 * shape.diagonal(), level);
    double const slack = att.hd_bound + shape.diagonal();
    r.expect(cover_misses(cc.F, cov, att.grid, slack) == 0, cc.name + ": cover contains attractor");
    r.expect(inflated_cover_misses(cc.F, cov, sel, att.grid, slack) == 0,
             cc.name + ": inflated balls cover attractor");
    // The subsystem attractor lies in the attractor.
    auto const G = subsystem(cc.F, cov, sel);
    auto const attG = attractor(G, 2.0 * shape.diagonal(), level);
    auto const grown = epsilon_neighborhood(att.grid, att.hd_bound + attG.hd_bound + shape.diagonal());
    r.expect(std::includes(grown.cells().begin(), grown.cells().end(), attG.grid.cells().begin(),
                           attG.grid.cells().end()),
             cc.name + ": subsystem attractor inside attractor");
    per.push_back({{"system", cc.name}, {"n", cc.n}, {"words", cov.words.size()},
                   {"N_n", sel.N}, {"ambiguous", sel.ambiguous.size()},
                   {"worst_inflation_ratio", ib.worst_ratio}});
  }
  r.stats["covers"] = per;
  return r;
}

/// Moran / Falconer consistency, bracket recomputation, box-count bounds,
/// capacity of subsystem attractors.
inline SuiteResult suite_dimension(std::uint64_t seed)
{
  SuiteResult r;
  r.name = "dimension";
  std::mt19937_64 rng(seed);
  for (int trial = 0; trial < 20; ++trial)
  {
    std::uniform_real_distribution<double> u(0.05, 0.45);
    std::uniform_int_distribution<int> cnt(2, 4);
    int const m = cnt(rng);
    double const ratio = u(rng);
    double const d = moran_dimension(std::vector<double>(m, ratio));
    auto const [lo, hi] = falconer_bracket(m, std::log(ratio), std::log(ratio));
    r.expect(std::abs(lo - d) <= 1e-10 && std::abs(hi - d) <= 1e-10,
             "Falconer bracket collapses to the Moran value");
  }
  for (auto const &cc : cover_cases())
  {
    if (cc.F.dim() != 1)
      continue;
    auto const h = hdim_bracket(cc.F, cc.n);
    auto const b = h.bracket;
    auto const again = bracket_from_ingredients(b.n, b.N, b.k, b.K, b.Q, b.D);
    r.expect(again.lower == b.lower && again.upper == b.upper, cc.name + ": bracket recomputation");
    r.expect(b.lower <= b.upper, cc.name + ": lower <= upper");

    GridSet const shape(1, 12, {});
    auto const att = attractor(cc.F, 2.0 * shape.diagonal(), 12);
    auto const est = limit_capacity(att.grid, 2, 12);
    for (std::size_t i = 1; i < est.counts.size(); ++i)
    {
      r.expect(est.counts[i] <= 2 * est.counts[i - 1], cc.name + ": doubling bound");
      r.expect(est.counts[i] >= est.counts[i - 1], cc.name + ": counts monotone");
    }
    r.expect(est.slope >= 0.0 && est.slope <= 1.0 + 1e-9, cc.name + ": slope in [0, n]");

    // Capacity of the subsystem attractor does not exceed the attractor's.
    auto const G = subsystem(cc.F, h.cover, h.disjoint);
    auto const attG = attractor(G, 2.0 * shape.diagonal(), 12);
    auto const estG = limit_capacity(attG.grid, 2, 12);
    double const tol = est.residual + estG.residual + 0.03;
    r.expect(estG.slope <= est.slope + tol, cc.name + ": capacity of subsystem attractor");
  }
  return r;
}

/// Measure brackets across levels, semi-continuity at t* = 1/2, modulus.
inline SuiteResult suite_measure(std::uint64_t seed)
{
  SuiteResult r;
  r.name = "measure";
  (void)seed;
  for (auto const &F : {make_three_branch(0.5), make_three_branch(0.0), make_full_interval()})
  {
    double prev_outer = std::numeric_limits<double>::infinity(), prev_inner = 0.0;
    for (int level = 8; level <= 12; ++level)
    {
      GridSet const shape(1, level, {});
      auto const att = attractor(F, 2.0 * shape.diagonal(), level);
      auto const mb = measure_bracket(att.grid, F);
      r.expect(0.0 <= mb.inner && mb.inner <= mb.outer && mb.outer <= 2.0, "bracket order");
      r.expect(mb.outer - mb.inner <= double(mb.boundary_cells) * mb.cell_volume + 1e-12 ||
                   mb.inner == 0.0,
               "bracket gap within boundary cells");
      r.expect(mb.outer <= prev_outer + 1e-12, "outer nonincreasing in level");
      r.expect(mb.inner >= prev_inner - 1e-12, "inner nondecreasing in level");
      prev_outer = mb.outer;
      prev_inner = mb.inner;
    }
  }
  for (auto const &[p, q] : std::vector<std::pair<long, long>>{{1, 2}, {2, 5}, {1, 5}})
  {
    auto const c = classify_rational(p, q);
    if (c.label != RationalCase::full_measure)
      continue;
    auto const F = make_three_branch(double(p) / double(q));
    auto const att = attractor(F, 2.0 * GridSet(1, 12, {}).diagonal(), 12);
    auto const mb = measure_bracket(att.grid, F);
    r.expect(mb.inner / 2.0 <= c.measure + 1e-12 && c.measure <= mb.outer / 2.0 + 1e-12,
             "full-measure case bracket contains 1/q");
  }
  auto const probe = measure_semicontinuity_probe(three_branch_family(0.5), 0.5, 0.05, 21, 12);
  r.expect(probe.pass, "upper semi-continuity probe at t* = 1/2");
  for (auto const &row : probe.rows)
    r.expect(row.contraction_ok, "attractor distance within d0 bound");
  r.stats["probe_slack"] = probe.slack;
  r.stats["probe_worst_excess"] = probe.worst_excess;

  auto const F = make_three_branch(0.5);
  auto const att = attractor(F, 2.0 * GridSet(1, 12, {}).diagonal(), 12);
  auto const ladder = modulus_ladder(att.grid, 0.1, 0.5, 6, 0.1, 10.0);
  for (auto const &m : ladder)
    r.expect(m.pass, "modulus inequality on the Delta ladder");
  return r;
}

/// Family invariants.
inline SuiteResult suite_families(std::uint64_t seed)
{
  SuiteResult r;
  r.name = "families";
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 0.5);
  for (int trial = 0; trial < 10; ++trial)
  {
    double const t = u(rng);
    auto const F = make_three_branch(t);
    auto const c = contraction_constants(F, 1.01);
    r.expect(std::abs(c.k - (std::log(3.0) - std::log(1.01))) <= 1e-12, "k = ln3 - ln1.01");
    r.expect(std::abs(c.K - (std::log(3.0) + std::log(1.01))) <= 1e-12, "K = ln3 + ln1.01");
    auto const rep = distortion_report(F, 6);
    r.expect(std::all_of(rep.Q.begin(), rep.Q.end(), [](double v) { return v == 0.0; }) &&
                 std::all_of(rep.D.begin(), rep.D.end(), [](double v) { return v == 0.0; }),
             "Q = D = 0");
    // Natural-frame round trip: normalized images de-normalize to the
    // natural maps.
    auto const fr = unit_frame();
    double const x = u(rng) * 2.0;
    double const xs = std::min(x, 1.0);
    double const y = fr.to_normalized(xs);
    std::array<double, 3> const shifts{0.0, t, 1.0};
    for (int j = 0; j < 3; ++j)
    {
      double const img = fr.to_natural(F[j].eval(make_vec({y}))(0));
      r.expect(std::abs(img - (xs + shifts[j]) / 3.0) <= 1e-12, "de-normalization round trip");
    }
  }
  for (long p = 0; p <= 6; ++p)
    for (long q = std::max(1L, 2 * p); q <= 13; ++q)
      for (long c = 2; c <= 4; ++c)
        r.expect(classify_rational(p, q).label == classify_rational(c * p, c * q).label,
                 "classification invariant under scaling");
  return r;
}

inline std::vector<std::string> suite_names()
{
  return {"metric", "contraction", "distortion", "cover", "dimension", "measure", "families"};
}

inline SuiteResult run_suite(std::string const &name, std::uint64_t seed)
{
  if (name == "metric")
    return suite_metric(seed);
  if (name == "contraction")
    return suite_contraction(seed);
  if (name == "distortion")
    return suite_distortion(seed);
  if (name == "cover")
    return suite_cover(seed);
  if (name == "dimension")
    return suite_dimension(seed);
  if (name == "measure")
    return suite_measure(seed);
  if (name == "families")
    return suite_families(seed);
  throw domain_error("unknown suite '" + name + "'");
}

} // namespace lsf
