#pragma once

// Distortion calculus for compositions: condition logs Q(n), distortion
// matrices C_n and D(n), and numerical checks of the distortion and scaling
// bounds.

#include "lsf/ifs.hpp"

namespace lsf
{

struct Sampling
{
  double net_eps = 0.05;          // spacing of the ball net for sampled sups
  std::uint64_t seed = 1;
  std::size_t word_cap = 1000000; // exhaustive affine enumeration limit |J|^n
  std::size_t eval_budget = 2000000; // (word, point) evaluations per depth
  std::size_t pair_budget = 50000;   // point pairs per depth for D(n)
};

struct DistortionReport
{
  int n_max = 0;
  std::vector<double> Q;  // Q[i-1] = Q(i)
  std::vector<double> D;
  std::vector<bool> exhaustive_Q;
  std::vector<bool> exhaustive_D;
  std::size_t words = 0;  // words evaluated
  Sampling sampling;
  double C = 0.0;         // H_alpha * sup ||(Df)^{-1}||
  double H_alpha = 0.0;
  double alpha = 1.0;
  double net_slack = 0.0; // H_alpha * net_eps^alpha for sampled sups

  double Q_at(int n) const { return n <= 0 ? 0.0 : Q.at(n - 1); }
  double D_at(int n) const { return n <= 0 ? 0.0 : D.at(n - 1); }
};

inline double cond_log(Mat const &J)
{
  auto const sv = singular_values(J);
  double const smax = sv(0), smin = sv(sv.size() - 1);
  if (!(smin >= 1e-14 * smax) || smax == 0.0)
    throw singularity_error("composed Jacobian is numerically singular");
  if (J.rows() == 1)
    return 0.0;
  return std::max(0.0, std::log(smax / smin));
}

/// ln(||J|| ||J^{-1}||) of the composed Jacobian at x.
inline double cond_log(System const &F, Word const &w, Vec const &x)
{
  if (w.empty())
    throw domain_error("condition log needs a nonempty word");
  return cond_log(compose(F, w).jacobian(x));
}

inline Mat C_matrix(ComposedMap const &g, Vec const &x0, Vec const &y0)
{
  Mat const Jx = g.jacobian(x0);
  Mat const Jy = g.jacobian(y0);
  cond_log(Jx);
  cond_log(Jy);
  return Jx.partialPivLu().solve(Jy);
}

/// (D f_w|x0)^{-1} (D f_w|y0).
inline Mat C_matrix(System const &F, Word const &w, Vec const &x0, Vec const &y0)
{
  return C_matrix(compose(F, w), x0, y0);
}

inline double word_count(std::size_t alphabet, int length)
{
  return std::pow(double(alphabet), length);
}

namespace detail
{

inline Word random_word(std::mt19937_64 &rng, std::size_t alphabet, int length)
{
  std::uniform_int_distribution<int> pick(0, static_cast<int>(alphabet) - 1);
  Word w;
  w.indices.resize(length);
  for (auto &j : w.indices)
    j = pick(rng);
  return w;
}

/// Calls visit(word) for every word of the given length in lexicographic order.
template <class Visit>
void for_each_word(std::size_t alphabet, int length, Visit &&visit)
{
  Word w;
  w.indices.assign(length, 0);
  while (true)
  {
    visit(static_cast<Word const &>(w));
    int i = length - 1;
    while (i >= 0 && ++w.indices[i] == static_cast<int>(alphabet))
      w.indices[i--] = 0;
    if (i < 0)
      return;
  }
}

// Exhaustive depth-first max of cond_log over affine words, per length.
inline void affine_cond_dfs(System const &F, Mat const &M, int depth, int n,
                            std::vector<double> &best, std::size_t &count)
{
  for (std::size_t j = 0; j < F.size(); ++j)
  {
    Mat const P = F[j].matrix() * M;
    best[depth] = std::max(best[depth], cond_log(P));
    ++count;
    if (depth + 1 < n)
      affine_cond_dfs(F, P, depth + 1, n, best, count);
  }
}

inline void running_max(std::vector<double> &v)
{
  for (std::size_t i = 1; i < v.size(); ++i)
    v[i] = std::max(v[i], v[i - 1]);
}

} // namespace detail

/// Q(1..n). Affine systems are enumerated exhaustively (|J|^n <= word_cap);
/// otherwise sampled over a ball net and words, a lower estimate of the sup.
inline DistortionReport Q_of_n(System const &F, int n, Sampling const &s = {})
{
  if (n < 1)
    throw domain_error("depth n must be at least 1");
  DistortionReport r;
  r.n_max = n;
  r.sampling = s;
  r.H_alpha = F.holder_const();
  r.alpha = F.holder_alpha();
  r.C = r.H_alpha * F.inverse_norm_bound();
  r.Q.assign(n, 0.0);
  r.exhaustive_Q.assign(n, true);
  if (F.dim() == 1)
    return r;

  if (F.is_affine())
  {
    if (word_count(F.size(), n) > double(s.word_cap))
      throw cap_error("Q(n) enumeration needs " + std::to_string(F.size()) + "^" +
                      std::to_string(n) + " words, above the cap of " +
                      std::to_string(s.word_cap) + "; use a smaller n");
    detail::affine_cond_dfs(F, Mat::Identity(F.dim(), F.dim()), 0, n, r.Q, r.words);
    detail::running_max(r.Q);
    return r;
  }

  auto const net = ball_net(F.dim(), s.net_eps);
  std::mt19937_64 rng(s.seed);
  r.net_slack = r.H_alpha * std::pow(s.net_eps, r.alpha);
  for (int i = 1; i <= n; ++i)
  {
    double &q = r.Q[i - 1];
    double const words = word_count(F.size(), i);
    if (words * double(net.size()) <= double(s.eval_budget))
    {
      detail::for_each_word(F.size(), i, [&](Word const &w) {
        auto const g = compose(F, w);
        for (auto const &x : net)
          q = std::max(q, cond_log(g.jacobian(x)));
        ++r.words;
      });
    }
    else
    {
      r.exhaustive_Q[i - 1] = false;
      std::uniform_int_distribution<std::size_t> pick(0, net.size() - 1);
      std::size_t const trials = std::max<std::size_t>(1, s.eval_budget / i);
      for (std::size_t k = 0; k < trials; ++k)
      {
        auto const g = compose(F, detail::random_word(rng, F.size(), i));
        q = std::max(q, cond_log(g.jacobian(net[pick(rng)])));
        ++r.words;
      }
    }
  }
  detail::running_max(r.Q);
  return r;
}

/// D(1..n): exactly zero for affine systems; otherwise sampled over word and
/// point-pair nets (flagged non-exhaustive when words were sampled).
inline DistortionReport D_of_n(System const &F, int n, Sampling const &s = {})
{
  if (n < 1)
    throw domain_error("depth n must be at least 1");
  DistortionReport r;
  r.n_max = n;
  r.sampling = s;
  r.H_alpha = F.holder_const();
  r.alpha = F.holder_alpha();
  r.C = r.H_alpha * F.inverse_norm_bound();
  r.D.assign(n, 0.0);
  r.exhaustive_D.assign(n, true);
  if (F.is_affine())
    return r;

  auto const net = ball_net(F.dim(), s.net_eps);
  r.net_slack = r.H_alpha * std::pow(s.net_eps, r.alpha);
  std::mt19937_64 rng(s.seed ^ 0x9e3779b97f4a7c15ull);
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  if (net.size() * net.size() <= s.pair_budget)
  {
    for (std::size_t a = 0; a < net.size(); ++a)
      for (std::size_t b = 0; b < net.size(); ++b)
        if (a != b)
          pairs.emplace_back(a, b);
  }
  else
  {
    std::uniform_int_distribution<std::size_t> pick(0, net.size() - 1);
    for (std::size_t k = 0; k < s.pair_budget; ++k)
      pairs.emplace_back(pick(rng), pick(rng));
  }

  auto pair_max = [&](ComposedMap const &g, std::vector<std::pair<std::size_t, std::size_t>> const &ps) {
    std::vector<Mat> J(net.size());
    std::vector<bool> have(net.size(), false);
    auto jac = [&](std::size_t i) -> Mat const & {
      if (!have[i])
      {
        J[i] = g.jacobian(net[i]);
        cond_log(J[i]);
        have[i] = true;
      }
      return J[i];
    };
    double best = 0.0;
    for (auto [a, b] : ps)
    {
      Mat const C = jac(a).partialPivLu().solve(jac(b));
      best = std::max(best, std::abs(std::log(sigma_max(C))));
    }
    return best;
  };

  for (int i = 1; i <= n; ++i)
  {
    double &d = r.D[i - 1];
    double const words = word_count(F.size(), i);
    double const cost = words * (double(pairs.size()) + double(net.size()) * i);
    if (cost <= double(s.eval_budget) * 10.0)
    {
      detail::for_each_word(F.size(), i, [&](Word const &w) {
        d = std::max(d, pair_max(compose(F, w), pairs));
        ++r.words;
      });
    }
    else
    {
      r.exhaustive_D[i - 1] = false;
      std::size_t const per_word = std::min<std::size_t>(pairs.size(), 256);
      std::size_t const nwords = std::max<std::size_t>(
          1, s.eval_budget / (per_word + std::size_t(2) * i * per_word));
      std::uniform_int_distribution<std::size_t> pick(0, pairs.size() - 1);
      for (std::size_t k = 0; k < nwords; ++k)
      {
        auto const g = compose(F, detail::random_word(rng, F.size(), i));
        std::vector<std::pair<std::size_t, std::size_t>> sub;
        for (std::size_t m = 0; m < per_word; ++m)
          sub.push_back(pairs[pick(rng)]);
        d = std::max(d, pair_max(g, sub));
        ++r.words;
      }
    }
  }
  detail::running_max(r.D);
  return r;
}

/// Q and D together.
inline DistortionReport distortion_report(System const &F, int n, Sampling const &s = {})
{
  auto r = Q_of_n(F, n, s);
  auto d = D_of_n(F, n, s);
  r.D = std::move(d.D);
  r.exhaustive_D = std::move(d.exhaustive_D);
  r.words += d.words;
  r.net_slack = std::max(r.net_slack, d.net_slack);
  return r;
}

/// Orbit of the ball B_0 spanned by the segment x0 y0 under the word's
/// prefixes; diameters[j] = |B_j| (exact for affine words, L-products else).
struct CompositionTrace
{
  Word word;
  Vec x0, y0;
  std::vector<double> diameters;
};

inline CompositionTrace make_trace(System const &F, Word const &w, Vec const &x0, Vec const &y0)
{
  check_word(F, w);
  CompositionTrace t{w, x0, y0, {}};
  double const d0 = (x0 - y0).norm();
  Word prefix;
  for (std::size_t j = 0; j < w.length(); ++j)
  {
    t.diameters.push_back(compose(F, prefix).lipschitz() * d0);
    prefix.indices.push_back(w.indices[j]);
  }
  return t;
}

struct BoundCheck
{
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;
  bool pass = false;
};

/// |ln|C_n v|| <= C sum_{j<n} e^{Q(j)} |B_j|^alpha with C = H_alpha sup||Df^{-1}||
/// and Q(0) = 0.
inline BoundCheck verify_distortion_bound(System const &F, CompositionTrace const &tr,
                                          Vec const &v, DistortionReport const &rep)
{
  BoundCheck out;
  if (tr.word.empty())
  {
    out.pass = true;
    return out;
  }
  Vec const u = v / v.norm();
  Mat const C = C_matrix(F, tr.word, tr.x0, tr.y0);
  out.lhs = std::abs(std::log((C * u).norm()));
  double const Cconst = F.holder_const() * F.inverse_norm_bound();
  int const n = static_cast<int>(tr.word.length());
  for (int j = 0; j < n; ++j)
  {
    double const q = j == 0 ? 0.0 : rep.Q_at(std::min(j, rep.n_max));
    out.rhs += std::exp(q) * std::pow(tr.diameters[j], F.holder_alpha());
  }
  out.rhs *= Cconst;
  out.slack = 1e-12 * std::max(1.0, out.rhs);
  out.pass = out.lhs <= out.rhs + out.slack;
  return out;
}

namespace detail
{

// Diameter of g(B): exact for affine words, sampled over the boundary sphere
// otherwise (with the uncertainty of the sampling returned).
inline Distance image_ball_diameter(ComposedMap const &g, Ball const &B)
{
  if (g.is_affine())
    return {2.0 * sigma_max(g.matrix()) * B.radius, 0.0};
  double const eps = g.dim() == 1 ? 1.0 : 0.02;
  std::vector<Vec> pts;
  for (auto const &u : sphere_net(g.dim(), eps))
    pts.push_back(g.eval(B.center + B.radius * u));
  double best = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j)
      best = std::max(best, (pts[i] - pts[j]).norm());
  double const unc = g.dim() == 1 ? 0.0 : 2.0 * g.lipschitz() * B.radius * eps;
  return {best, unc};
}

inline void check_ball(Ball const &B, int dim)
{
  if (B.center.size() != dim)
    throw representation_mismatch("ball dimension does not match system");
  if (B.center.norm() + B.radius > 1.0 + 1e-12)
    throw domain_error("ball must lie inside the unit ball");
}

} // namespace detail

/// |ln(|f_a f_b(B)|/|f_a(B)| * |B|/|f_b(B)|)| <= 2Q(n) + 2D(n).
inline BoundCheck verify_scaling(System const &F, Word const &wa, Word const &wb,
                                 Ball const &B, DistortionReport const &rep)
{
  detail::check_ball(B, F.dim());
  int const n = rep.n_max;
  if (static_cast<int>(wa.length()) > n || static_cast<int>(wb.length()) > n)
    throw precondition_error("scaling check needs words no longer than the depth "
                             "at which Q and D were computed");
  Word ab = wb;
  ab.indices.insert(ab.indices.end(), wa.indices.begin(), wa.indices.end());
  auto const dab = detail::image_ball_diameter(compose(F, ab), B);
  auto const da = detail::image_ball_diameter(compose(F, wa), B);
  auto const db = detail::image_ball_diameter(compose(F, wb), B);
  double const dB = B.diameter();
  BoundCheck out;
  out.lhs = std::abs(std::log(dab.value / da.value * dB / db.value));
  out.rhs = 2.0 * rep.Q_at(n) + 2.0 * rep.D_at(n);
  out.slack = dab.uncertainty / std::max(dab.value, 1e-300) +
              da.uncertainty / std::max(da.value, 1e-300) +
              db.uncertainty / std::max(db.value, 1e-300) + 1e-12;
  out.pass = out.lhs <= out.rhs + out.slack;
  return out;
}

struct MeanValueCheck
{
  double ratio = 0.0;
  double dmin = 0.0;
  double dmax = 0.0;
  double slack = 0.0;
  bool pass = false;
};

/// |g(A)|/|A| lies between the extreme directional derivative gains of g on A.
inline MeanValueCheck mean_value_check(System const &F, Word const &w, Ball const &A)
{
  detail::check_ball(A, F.dim());
  auto const g = compose(F, w);
  auto const d = detail::image_ball_diameter(g, A);
  MeanValueCheck out;
  out.ratio = d.value / A.diameter();
  out.dmin = std::numeric_limits<double>::infinity();
  out.dmax = 0.0;
  std::vector<Vec> pts;
  if (g.is_affine())
    pts.push_back(A.center);
  else
    for (auto const &u : ball_net(F.dim(), F.dim() == 1 ? 0.01 : 0.1))
      pts.push_back(A.center + A.radius * u);
  auto const dirs = F.dim() == 1 ? std::vector<Vec>{make_vec({1.0})}
                                 : direction_net(F.dim(), 0.02);
  for (auto const &x : pts)
  {
    Mat const J = g.jacobian(x);
    for (auto const &v : dirs)
    {
      double const gain = (J * v).norm();
      out.dmin = std::min(out.dmin, gain);
      out.dmax = std::max(out.dmax, gain);
    }
  }
  // Net error: point spacing through the Hoelder modulus, direction spacing
  // through the operator norm.
  double const point_eps = g.is_affine() ? 0.0 : A.radius * (F.dim() == 1 ? 0.01 : 0.1);
  double const dir_eps = F.dim() == 1 ? 0.0 : 0.02;
  out.slack = g.holder_const() * point_eps + g.lipschitz() * dir_eps +
              d.uncertainty / A.diameter() + 1e-12;
  out.pass = out.dmin - out.slack <= out.ratio && out.ratio <= out.dmax + out.slack;
  return out;
}

enum class Conformality
{
  conformal,
  decreasing,
  flat_positive,
  inconclusive
};

inline std::string to_string(Conformality c)
{
  switch (c)
  {
  case Conformality::conformal:
    return "CONFORMAL";
  case Conformality::decreasing:
    return "DECREASING";
  case Conformality::flat_positive:
    return "FLAT-POSITIVE";
  case Conformality::inconclusive:
    return "INCONCLUSIVE";
  }
  return "INCONCLUSIVE";
}

struct ConformalityDiagnostic
{
  std::vector<double> ratios;  // Q(n)/n, n = 1..n_max
  double relative_slope = 0.0;
  Conformality verdict = Conformality::inconclusive;
};

/// Empirical classification of Q(n)/n: CONFORMAL when identically zero;
/// otherwise the least-squares slope over the second half of the depths,
/// scaled by n_max/mean, decides DECREASING (< -0.25) or FLAT-POSITIVE
/// (|.| <= 0.1).
inline ConformalityDiagnostic semi_conformality_diagnostic(System const &F, int n_max,
                                                           Sampling const &s = {})
{
  if (n_max < 2)
    throw domain_error("conformality diagnostic needs n_max >= 2");
  auto const rep = Q_of_n(F, n_max, s);
  ConformalityDiagnostic out;
  double peak = 0.0;
  for (int n = 1; n <= n_max; ++n)
  {
    out.ratios.push_back(rep.Q_at(n) / n);
    peak = std::max(peak, out.ratios.back());
  }
  if (peak <= 1e-12)
  {
    out.verdict = Conformality::conformal;
    return out;
  }
  int const first = std::max(1, n_max / 2);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (int n = first; n <= n_max; ++n, ++m)
  {
    double const y = out.ratios[n - 1];
    sx += n;
    sy += y;
    sxx += double(n) * n;
    sxy += n * y;
  }
  double const slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  double const mean = sy / m;
  out.relative_slope = mean > 0.0 ? slope * n_max / mean : 0.0;
  if (out.relative_slope < -0.25)
    out.verdict = Conformality::decreasing;
  else if (std::abs(out.relative_slope) <= 0.1)
    out.verdict = Conformality::flat_positive;
  else
    out.verdict = Conformality::inconclusive;
  return out;
}

/// ||J^{-1}||^{-1}|v| <= |Jv| <= ||J|| |v|; returns the worse of the two
/// relative violations (<= 0 when the sandwich holds).
inline double norm_sandwich_residual(Mat const &J, Vec const &v)
{
  auto const sv = singular_values(J);
  double const jv = (J * v).norm();
  double const nv = v.norm();
  double const low = sv(sv.size() - 1) * nv - jv;
  double const high = jv - sv(0) * nv;
  return std::max(low, high) / std::max(jv, 1e-300);
}

struct TransferCheck
{
  double ratio = 0.0;     // |J_x0 w(v)| / |J_y0 v|
  double expected = 0.0;  // 1/|C v|
  double log_gain = 0.0;  // |ln(1/|C v|)|
};

/// With w(v) = C v/|C v|: |D f_w|x0 w(v)| / |D f_w|y0 v| = 1/|C v|.
inline TransferCheck direction_transfer_check(System const &F, Word const &w, Vec const &x0,
                                              Vec const &y0, Vec const &v)
{
  auto const g = compose(F, w);
  Vec const u = v / v.norm();
  Mat const C = C_matrix(g, x0, y0);
  Vec const Cu = C * u;
  Vec const wv = Cu / Cu.norm();
  TransferCheck out;
  out.ratio = (g.jacobian(x0) * wv).norm() / (g.jacobian(y0) * u).norm();
  out.expected = 1.0 / Cu.norm();
  out.log_gain = std::abs(std::log(out.expected));
  return out;
}

/// |ln(|J_x0 u| / |J_y0 v|)| for unit u, v; bounded by D(n) + Q(n).
inline double cross_gain_log(System const &F, Word const &w, Vec const &x0, Vec const &y0,
                             Vec const &u, Vec const &v)
{
  auto const g = compose(F, w);
  return std::abs(std::log((g.jacobian(x0) * (u / u.norm())).norm() /
                           (g.jacobian(y0) * (v / v.norm())).norm()));
}

} // namespace lsf
