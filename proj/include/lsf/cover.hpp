#pragma once

// Dynamic covers of the attractor by word images, maximal disjoint
// subsystems, and open-set-condition certification.

#include "lsf/distortion.hpp"

#include <deque>
#include <map>

namespace lsf
{

/// e^{-K} < sigma_min(Df) and ||Df|| < e^{-k} on the ball, with a
/// multiplicative safety factor (1 gives the unslacked constants).
struct ContractionConstants
{
  double k = 0.0;
  double K = 0.0;
  double slack = 1.01;
};

inline ContractionConstants contraction_constants(System const &F, double slack = 1.01)
{
  if (!(slack >= 1.0))
    throw domain_error("contraction slack factor must be >= 1");
  ContractionConstants c;
  c.slack = slack;
  c.k = -std::log(slack * F.lipschitz());
  c.K = -std::log(F.sigma_min_bound() / slack);
  if (!(c.k > 0.0))
    throw domain_error("slack factor destroys contraction (k <= 0)");
  return c;
}

struct DiameterBracket
{
  double lo = 0.0;
  double hi = 0.0;
};

/// |f_w(I)|: exact for affine words and for 1-D words (monotone images of an
/// interval); otherwise [sampled image diameter, 2 * prod L].
inline DiameterBracket image_diameter(ComposedMap const &g)
{
  if (g.is_affine())
  {
    double const d = 2.0 * g.lipschitz();
    return {d, d};
  }
  if (g.dim() == 1)
  {
    double const d = std::abs(g.eval(make_vec({1.0}))(0) - g.eval(make_vec({-1.0}))(0));
    return {d, d};
  }
  auto const d = detail::image_ball_diameter(g, Ball(zero_vec(g.dim()), 1.0));
  return {d.value, 2.0 * g.lipschitz()};
}

inline DiameterBracket image_diameter(System const &F, Word const &w)
{
  return image_diameter(compose(F, w));
}

struct CoverWord
{
  Word word;
  double lo = 0.0;
  double hi = 0.0;
};

struct DynamicCover
{
  int n = 0;
  std::vector<CoverWord> words;  // lexicographic order
  ContractionConstants constants;
  double Q = 0.0;
  double D = 0.0;
  double window_lo = 0.0;  // 2 e^{-2Q-2D-K-nk}
  double window_hi = 0.0;  // 2 e^{-nk}
  std::vector<std::size_t> lower_violations;  // words below the lower bound

  std::size_t max_length() const
  {
    std::size_t m = 0;
    for (auto const &w : words)
      m = std::max(m, w.word.length());
    return m;
  }

  bool window_holds() const
  {
    for (auto const &w : words)
      if (!(w.hi < window_hi) || w.lo < window_lo * (1.0 - 1e-12))
        return false;
    return true;
  }
};

/// Refines single letters f_j(I) into f_w f_j(I) until every diameter drops
/// below 2e^{-nk}. The lower window bound is only asserted; violations are
/// recorded as a distortion-constants diagnostic.
inline DynamicCover build_dynamic_cover(System const &F, int n, ContractionConstants const &c,
                                        double Q, double D,
                                        std::size_t frontier_cap = 1000000)
{
  if (n < 1)
    throw domain_error("cover level n must be at least 1");
  DynamicCover cov;
  cov.n = n;
  cov.constants = c;
  cov.Q = Q;
  cov.D = D;
  cov.window_hi = 2.0 * std::exp(-n * c.k);
  cov.window_lo = 2.0 * std::exp(-2.0 * Q - 2.0 * D - c.K - n * c.k);
  double const accept = cov.window_hi * (1.0 - 1e-12);

  std::vector<Word> frontier;
  for (std::size_t j = 0; j < F.size(); ++j)
    frontier.push_back(Word{{static_cast<int>(j)}});
  while (!frontier.empty())
  {
    std::vector<Word> next;
    for (auto &w : frontier)
    {
      auto const d = image_diameter(F, w);
      if (d.hi < accept)
      {
        cov.words.push_back({std::move(w), d.lo, d.hi});
        continue;
      }
      for (std::size_t j = 0; j < F.size(); ++j)
      {
        Word child;
        child.indices.reserve(w.length() + 1);
        child.indices.push_back(static_cast<int>(j));
        child.indices.insert(child.indices.end(), w.indices.begin(), w.indices.end());
        next.push_back(std::move(child));
      }
      if (next.size() + cov.words.size() > frontier_cap)
        throw cap_error("dynamic cover frontier exceeds " + std::to_string(frontier_cap) +
                        " words; use a smaller n");
    }
    frontier = std::move(next);
  }
  std::sort(cov.words.begin(), cov.words.end(),
            [](auto const &a, auto const &b) { return a.word < b.word; });
  for (std::size_t i = 0; i < cov.words.size(); ++i)
    if (cov.words[i].lo < cov.window_lo * (1.0 - 1e-12))
      cov.lower_violations.push_back(i);
  return cov;
}

/// Convenience overload computing Q(n), D(n) with default sampling.
inline DynamicCover build_dynamic_cover(System const &F, int n, ContractionConstants const &c)
{
  auto const rep = distortion_report(F, n);
  return build_dynamic_cover(F, n, c, rep.Q_at(n), rep.D_at(n));
}

enum class Reading
{
  open,   // images touching along their boundary count as disjoint
  closed  // any common point, including touching, counts as overlap
};

struct DisjointSubsystem
{
  int n = 0;
  std::vector<std::size_t> selected;  // indices into the cover's word list
  std::vector<std::size_t> ambiguous;
  std::size_t N = 0;
  Reading reading = Reading::open;
  bool maximal = false;  // re-scan: every rejected word meets a selected one
};

namespace detail
{

enum class Overlap
{
  disjoint,
  touching,
  overlapping,
  unknown
};

struct ImageShape
{
  Vec center;
  Mat shape;            // affine: image = shape * ball + center
  double lo = 0.0, hi = 0.0;  // 1-D interval
  double outer = 0.0;   // enclosing radius (non-affine nD)
  double inner = 0.0;   // inscribed radius (non-affine nD)
  bool affine = true;
};

inline ImageShape image_shape(ComposedMap const &g)
{
  ImageShape s;
  s.affine = g.is_affine();
  if (g.dim() == 1)
  {
    double const a = g.eval(make_vec({-1.0}))(0);
    double const b = g.eval(make_vec({1.0}))(0);
    s.lo = std::min(a, b);
    s.hi = std::max(a, b);
    s.center = make_vec({0.5 * (a + b)});
    return s;
  }
  s.center = g.eval(zero_vec(g.dim()));
  if (s.affine)
    s.shape = g.matrix();
  s.outer = g.lipschitz();
  s.inner = g.sigma_min_bound();
  return s;
}

/// min over s in (0,1) of 1 - d^T (P1/(1-s) + P2/s)^{-1} d; positive iff the
/// ellipsoid interiors overlap, zero when they touch, negative when apart.
inline double ellipsoid_overlap_value(Mat const &P1, Mat const &P2, Vec const &d)
{
  auto K = [&](double s) {
    Mat const S = P1 / (1.0 - s) + P2 / s;
    return 1.0 - d.dot(S.ldlt().solve(d));
  };
  int const grid = 64;
  int best_i = 0;
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < grid; ++i)
  {
    double const v = K((i + 0.5) / grid);
    if (v < best)
    {
      best = v;
      best_i = i;
    }
  }
  double a = std::max(1e-12, double(best_i - 1 + 0.5) / grid);
  double b = std::min(1.0 - 1e-12, double(best_i + 1 + 0.5) / grid);
  double const phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
  double f1 = K(x1), f2 = K(x2);
  for (int it = 0; it < 80; ++it)
  {
    if (f1 < f2)
    {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - phi * (b - a);
      f1 = K(x1);
    }
    else
    {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + phi * (b - a);
      f2 = K(x2);
    }
  }
  return std::min({best, f1, f2});
}

inline Overlap classify_overlap(ImageShape const &p, ImageShape const &q, int dim)
{
  double const eta = touch_tol;
  if (dim == 1)
  {
    double const ov = std::min(p.hi, q.hi) - std::max(p.lo, q.lo);
    if (ov > eta)
      return Overlap::overlapping;
    return ov < -eta ? Overlap::disjoint : Overlap::touching;
  }
  double const dist = (p.center - q.center).norm();
  if (p.affine && q.affine)
  {
    double const rp = sigma_max(p.shape), rq = sigma_max(q.shape);
    if (dist > rp + rq + eta)
      return Overlap::disjoint;
    double const v = ellipsoid_overlap_value(p.shape * p.shape.transpose(),
                                             q.shape * q.shape.transpose(),
                                             q.center - p.center);
    if (v > 1e-10)
      return Overlap::overlapping;
    return v < -1e-10 ? Overlap::disjoint : Overlap::touching;
  }
  if (dist > p.outer + q.outer + eta)
    return Overlap::disjoint;
  if (dist < p.inner + q.inner - eta)
    return Overlap::overlapping;
  return Overlap::unknown;
}

inline bool counts_as_disjoint(Overlap o, Reading r)
{
  return o == Overlap::disjoint || (o == Overlap::touching && r == Reading::open);
}

} // namespace detail

/// Greedy selection in lexicographic word order of pairwise disjoint images.
/// Pairs whose relation cannot be decided are excluded and counted.
inline DisjointSubsystem maximal_disjoint(System const &F, DynamicCover const &cov,
                                          Reading reading = Reading::open)
{
  DisjointSubsystem out;
  out.n = cov.n;
  out.reading = reading;
  int const dim = F.dim();
  std::vector<detail::ImageShape> shapes;
  shapes.reserve(cov.words.size());
  for (auto const &w : cov.words)
    shapes.push_back(detail::image_shape(compose(F, w.word)));

  std::vector<bool> chosen(cov.words.size(), false);
  if (dim == 1)
  {
    // Selected intervals are pairwise disjoint, so only the neighbors in
    // left-endpoint order can meet a new interval.
    std::multimap<double, std::size_t> sel;
    for (std::size_t i = 0; i < shapes.size(); ++i)
    {
      auto const &s = shapes[i];
      bool ok = true;
      auto it = sel.lower_bound(s.lo);
      if (it != sel.end() &&
          !detail::counts_as_disjoint(detail::classify_overlap(s, shapes[it->second], 1), reading))
        ok = false;
      if (ok && it != sel.begin() &&
          !detail::counts_as_disjoint(
              detail::classify_overlap(s, shapes[std::prev(it)->second], 1), reading))
        ok = false;
      if (ok)
      {
        sel.emplace(s.lo, i);
        chosen[i] = true;
        out.selected.push_back(i);
      }
    }
  }
  else
  {
    for (std::size_t i = 0; i < shapes.size(); ++i)
    {
      bool ok = true, unknown = false;
      for (auto j : out.selected)
      {
        auto const o = detail::classify_overlap(shapes[i], shapes[j], dim);
        if (o == detail::Overlap::unknown)
          unknown = true;
        else if (!detail::counts_as_disjoint(o, reading))
        {
          ok = false;
          break;
        }
      }
      if (ok && unknown)
      {
        out.ambiguous.push_back(i);
        continue;
      }
      if (ok)
      {
        chosen[i] = true;
        out.selected.push_back(i);
      }
    }
  }
  out.N = out.selected.size();

  // Maximality re-scan.
  out.maximal = true;
  std::vector<bool> is_ambiguous(cov.words.size(), false);
  for (auto i : out.ambiguous)
    is_ambiguous[i] = true;
  for (std::size_t i = 0; i < shapes.size() && out.maximal; ++i)
  {
    if (chosen[i] || is_ambiguous[i])
      continue;
    bool meets = false;
    for (auto j : out.selected)
      if (!detail::counts_as_disjoint(detail::classify_overlap(shapes[i], shapes[j], dim),
                                      reading))
      {
        meets = true;
        break;
      }
    out.maximal = meets;
  }
  return out;
}

/// The selected words as a system G_n.
inline System subsystem(System const &F, DynamicCover const &cov, DisjointSubsystem const &sel)
{
  std::vector<ContractionMap> maps;
  for (auto i : sel.selected)
    maps.push_back(compose(F, cov.words[i].word).to_map());
  return System(F.dim(), std::move(maps));
}

struct InflatedBallCheck
{
  std::size_t checked = 0;
  std::size_t failures = 0;
  double worst_ratio = 0.0;  // max |V~| / (4 e^{2Q+2D+K} |V|)
};

/// For balls V~ of radius 4e^{-nk} around points of V in the disjoint family:
/// |V~| <= 4 e^{2Q(n)+2D(n)+K} |V|, using the certified lower diameter of V.
inline InflatedBallCheck inflated_ball_check(DynamicCover const &cov, DisjointSubsystem const &sel)
{
  InflatedBallCheck out;
  double const big = 8.0 * std::exp(-cov.n * cov.constants.k);
  double const factor = 4.0 * std::exp(2.0 * cov.Q + 2.0 * cov.D + cov.constants.K);
  for (auto i : sel.selected)
  {
    double const r = big / (factor * cov.words[i].lo);
    out.worst_ratio = std::max(out.worst_ratio, r);
    ++out.checked;
    if (r > 1.0 + 1e-12)
      ++out.failures;
  }
  return out;
}

namespace detail
{

// Distance from p to the image f_w(I); an upper bound for non-affine maps.
inline double distance_to_image(ImageShape const &s, Vec const &p, int dim)
{
  if (dim == 1)
    return std::max({0.0, s.lo - p(0), p(0) - s.hi});
  if (s.affine)
  {
    Vec const r = p - s.center;
    if (s.shape.partialPivLu().solve(r).norm() <= 1.0)
      return 0.0;
    // Nearest point S y, |y| = 1: y_i = sig_i r_i / (sig_i^2 + lambda) in the
    // singular basis, with lambda > 0 found by bisection on |y| = 1.
    Eigen::JacobiSVD<Mat> svd(s.shape, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Vec const sig = svd.singularValues();
    Vec const rr = svd.matrixU().transpose() * r;
    auto ynorm = [&](double lambda) {
      double t = 0.0;
      for (int i = 0; i < dim; ++i)
        t += std::pow(sig(i) * rr(i) / (sig(i) * sig(i) + lambda), 2);
      return std::sqrt(t);
    };
    double lo = 0.0, hi = std::max(1.0, sig(0) * rr.norm());
    while (ynorm(hi) > 1.0)
      hi *= 2.0;
    for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it)
    {
      double const mid = 0.5 * (lo + hi);
      (ynorm(mid) > 1.0 ? lo : hi) = mid;
    }
    double d = 0.0;
    for (int i = 0; i < dim; ++i)
    {
      double const yi = sig(i) * rr(i) / (sig(i) * sig(i) + hi);
      d += std::pow(sig(i) * yi - rr(i), 2);
    }
    return std::sqrt(d);
  }
  return std::max(0.0, (p - s.center).norm() - s.outer);
}

} // namespace detail

/// Number of attractor cell centers farther than slack from every word image.
inline std::size_t cover_misses(System const &F, DynamicCover const &cov, GridSet const &att,
                                double slack)
{
  std::vector<detail::ImageShape> shapes;
  for (auto const &w : cov.words)
    shapes.push_back(detail::image_shape(compose(F, w.word)));
  std::size_t misses = 0;
  if (F.dim() == 1)
  {
    std::sort(shapes.begin(), shapes.end(), [](auto const &a, auto const &b) { return a.lo < b.lo; });
    std::vector<double> prefix_hi(shapes.size());
    double run = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < shapes.size(); ++i)
      prefix_hi[i] = run = std::max(run, shapes[i].hi);
    for (auto c : att.cells())
    {
      double const x = att.center(c)(0);
      auto it = std::upper_bound(shapes.begin(), shapes.end(), x + slack,
                                 [](double v, auto const &s) { return v < s.lo; });
      std::size_t const k = static_cast<std::size_t>(it - shapes.begin());
      if (k == 0 || prefix_hi[k - 1] < x - slack)
        ++misses;
    }
    return misses;
  }
  for (auto c : att.cells())
  {
    Vec const p = att.center(c);
    bool hit = false;
    for (auto const &s : shapes)
      if (detail::distance_to_image(s, p, F.dim()) <= slack)
      {
        hit = true;
        break;
      }
    misses += hit ? 0 : 1;
  }
  return misses;
}

/// Attractor cell centers farther than 4e^{-nk} + slack from all points x_V
/// (image centers of the selected words); zero when the inflated balls cover.
inline std::size_t inflated_cover_misses(System const &F, DynamicCover const &cov,
                                         DisjointSubsystem const &sel, GridSet const &att,
                                         double slack)
{
  std::vector<Vec> centers;
  for (auto i : sel.selected)
    centers.push_back(detail::image_shape(compose(F, cov.words[i].word)).center);
  if (centers.empty())
    return att.size();
  NearestIndex index(centers);
  double const r = 4.0 * std::exp(-cov.n * cov.constants.k) + slack;
  std::size_t misses = 0;
  for (auto c : att.cells())
    misses += index.distance(att.center(c)) > r ? 1 : 0;
  return misses;
}

/// Open axis-aligned box in normalized coordinates.
struct Box
{
  Vec lo, hi;

  int dim() const { return static_cast<int>(lo.size()); }
  Vec mid() const { return 0.5 * (lo + hi); }
  Vec half() const { return 0.5 * (hi - lo); }
};

struct OscResult
{
  bool certified = false;        // images of V (shrunk by the margin) strictly separated
  bool closure_disjoint = false; // images of the closed box also disjoint
  bool invariant = true;         // every f_i(V) inside V
  int witness_i = -1;            // first failing pair; (i, i) when f_i(V) leaves V
  int witness_j = -1;
  double min_margin = 0.0;       // smallest separating gap over pairs
  std::vector<double> margins;   // per pair (i<j, row-major)
};

namespace detail
{

struct Parallelotope
{
  Vec center;
  std::vector<Vec> edges;  // half-edge vectors
};

inline Parallelotope box_image(ContractionMap const &f, Vec const &mid, Vec const &half)
{
  int const n = f.dim();
  Parallelotope p;
  p.center = f.eval(mid);
  if (f.is_affine())
  {
    for (int k = 0; k < n; ++k)
      p.edges.push_back(f.matrix().col(k) * half(k));
    return p;
  }
  // Mean-value enclosure with entrywise Jacobian bounds on the cube.
  Mat Jb = f.matrix().cwiseAbs();
  for (auto const &t : f.terms())
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        Jb(i, j) += std::abs(t.coef(i)) * t.exps[j];
  Vec const ext = Jb * half;
  for (int k = 0; k < n; ++k)
  {
    Vec e = Vec::Zero(n);
    e(k) = ext(k);
    p.edges.push_back(e);
  }
  return p;
}

inline std::vector<Vec> separating_axes(Parallelotope const &a, Parallelotope const &b, int n)
{
  std::vector<Vec> axes;
  auto push = [&](Vec v) {
    double const r = v.norm();
    if (r > 1e-14)
      axes.push_back(v / r);
  };
  if (n == 1)
    return {make_vec({1.0})};
  if (n == 2)
  {
    for (auto const *p : {&a, &b})
      for (auto const &e : p->edges)
        push(make_vec({-e(1), e(0)}));
    return axes;
  }
  auto cross = [](Vec const &u, Vec const &v) {
    return make_vec({u(1) * v(2) - u(2) * v(1), u(2) * v(0) - u(0) * v(2),
                     u(0) * v(1) - u(1) * v(0)});
  };
  for (auto const *p : {&a, &b})
    for (int i = 0; i < 3; ++i)
      for (int j = i + 1; j < 3; ++j)
        push(cross(p->edges[i], p->edges[j]));
  for (auto const &e : a.edges)
    for (auto const &f : b.edges)
      push(cross(e, f));
  return axes;
}

/// Largest gap between the projections over candidate axes; positive iff
/// separated (exact for convex polytopes by the separating axis theorem).
inline double separation_gap(Parallelotope const &a, Parallelotope const &b, int n)
{
  double best = -std::numeric_limits<double>::infinity();
  for (auto const &u : separating_axes(a, b, n))
  {
    auto project = [&](Parallelotope const &p) {
      double c = u.dot(p.center), r = 0.0;
      for (auto const &e : p.edges)
        r += std::abs(u.dot(e));
      return std::pair{c - r, c + r};
    };
    auto [a0, a1] = project(a);
    auto [b0, b1] = project(b);
    best = std::max(best, std::max(b0 - a1, a0 - b1));
  }
  return best;
}

} // namespace detail

/// Open set condition for the open box V: the images f_i(V°), V° = V shrunk
/// by 1e-9, must be pairwise strictly separated. V must contain the supplied
/// attractor estimate (cell centers within its error bound).
inline OscResult check_osc(System const &F, Box const &V, GridSet const &att, double att_error)
{
  int const n = F.dim();
  if (V.dim() != n)
    throw representation_mismatch("box dimension does not match system");
  // Affine maps extend to all of R^n, so only non-affine systems need V
  // inside the cube where their derivative bounds hold.
  bool const inside_needed = !F.is_affine();
  for (int a = 0; a < n; ++a)
  {
    if (!(V.lo(a) < V.hi(a)))
      throw domain_error("box must be nonempty");
    if (inside_needed && (V.lo(a) < -1.0 - 1e-12 || V.hi(a) > 1.0 + 1e-12))
      throw domain_error("box must lie inside [-1,1]^n for non-affine maps");
  }
  double const allow = att_error + att.half_diagonal();
  for (auto c : att.cells())
  {
    Vec const p = att.center(c);
    double d2 = 0.0;
    for (int a = 0; a < n; ++a)
    {
      double const out = std::max({0.0, V.lo(a) - p(a), p(a) - V.hi(a)});
      d2 += out * out;
    }
    if (std::sqrt(d2) > allow)
      throw precondition_error("box V does not contain the attractor estimate");
  }

  double const margin = 1e-9;
  Vec const half = V.half();
  Vec const inner_half = (half.array() - margin).max(0.0).matrix();
  OscResult out;
  out.certified = true;
  out.closure_disjoint = true;
  out.min_margin = std::numeric_limits<double>::infinity();
  // f_i(V) must stay inside V.
  for (std::size_t i = 0; i < F.size(); ++i)
  {
    auto const p = detail::box_image(F[i], V.mid(), half);
    for (int a = 0; a < n; ++a)
    {
      double ext = 0.0;
      for (auto const &e : p.edges)
        ext += std::abs(e(a));
      if (p.center(a) - ext < V.lo(a) - touch_tol || p.center(a) + ext > V.hi(a) + touch_tol)
        out.invariant = false;
    }
    if (!out.invariant)
    {
      out.certified = false;
      out.witness_i = out.witness_j = static_cast<int>(i);
      break;
    }
  }
  for (std::size_t i = 0; i < F.size(); ++i)
    for (std::size_t j = i + 1; j < F.size(); ++j)
    {
      auto const pi = detail::box_image(F[i], V.mid(), inner_half);
      auto const pj = detail::box_image(F[j], V.mid(), inner_half);
      double const gap = detail::separation_gap(pi, pj, n);
      auto const ci = detail::box_image(F[i], V.mid(), half);
      auto const cj = detail::box_image(F[j], V.mid(), half);
      double const closed_gap = detail::separation_gap(ci, cj, n);
      out.margins.push_back(gap);
      out.min_margin = std::min(out.min_margin, gap);
      if (!(closed_gap > 0.0))
        out.closure_disjoint = false;
      if (!(gap > 0.0) && out.certified)
      {
        out.certified = false;
        out.witness_i = static_cast<int>(i);
        out.witness_j = static_cast<int>(j);
      }
    }
  if (F.size() < 2)
    out.min_margin = 0.0;
  return out;
}

/// Computes its own attractor estimate at a moderate grid level.
inline OscResult check_osc(System const &F, Box const &V)
{
  int const level = F.dim() == 1 ? 14 : (F.dim() == 2 ? 9 : 6);
  GridSet const probe(F.dim(), level, {});
  auto const att = attractor(F, 2.0 * probe.diagonal(), level);
  return check_osc(F, V, att.grid, att.hd_bound);
}

} // namespace lsf
