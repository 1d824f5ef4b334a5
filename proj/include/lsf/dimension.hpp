#pragma once

// Box-counting capacity, dimension brackets from dynamic covers, and the
// Moran equation for exact self-similar baselines.

#include "lsf/cover.hpp"

#include <unordered_set>

namespace lsf
{

/// Box lattice used for counting: boxes of side unit * base^{-j} anchored at
/// the corner -1 of the grid cube. Base 2 with unit 1 is exact coarsening of
/// the dyadic grid (side 2^{-j}); other bases (3 for triadic sets) count a box
/// when it holds an occupied cell center deeper than the erosion margin, so
/// superset cells hugging a box face do not inflate the count.
struct BoxLattice
{
  int base = 2;
  double unit = 1.0;
  double erosion = -1.0;  // base != 2 only: depth a center must have inside its box; <0 = auto

  static BoxLattice dyadic() { return {2, 1.0, -1.0}; }
  /// Triadic boxes; unit 2 makes side 3^{-j} in the [0,1] natural frame.
  static BoxLattice triadic(double unit = 2.0) { return {3, unit, -1.0}; }
  /// Boxes of side unit * base^{-j}, e.g. base 5 for ratio-1/5 systems.
  static BoxLattice adic(int base, double unit = 2.0)
  {
    if (base < 2)
      throw domain_error("box lattice base must be at least 2");
    return {base, unit, -1.0};
  }

  double side(int j) const { return unit * std::pow(double(base), -j); }
};

struct CapacityEstimate
{
  std::vector<int> levels;
  std::vector<double> scales;   // box sides delta_j
  std::vector<std::uint64_t> counts;
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;        // rms residual of the log-log fit
  int window_first = 0;         // indices into levels used for the fit
  int window_last = -1;
  bool flat = false;
  BoxLattice lattice;
};

/// nu(delta_j) for j in [j0, j1].
inline CapacityEstimate box_counts(GridSet const &A, int j0, int j1,
                                   BoxLattice lat = BoxLattice::dyadic())
{
  if (A.empty())
    throw empty_set_error("box counts of an empty set");
  if (j0 < 0 || j1 < j0)
    throw domain_error("invalid level range");
  CapacityEstimate est;
  est.lattice = lat;
  int const m = A.level();
  int const n = A.dim();
  if (lat.base == 2 && lat.unit == 1.0)
  {
    if (j1 > m)
      throw resolution_error("requested box level " + std::to_string(j1) +
                                 " exceeds grid level " + std::to_string(m),
                             std::ldexp(1.0, -m));
    for (int j = j0; j <= j1; ++j)
    {
      int const shift = m - j;
      std::unordered_set<std::uint64_t> boxes;
      for (auto c : A.cells())
      {
        auto k = A.coords(c);
        std::uint64_t key = 0;
        for (int a = 0; a < n; ++a)
          key = (key << 21) | static_cast<std::uint64_t>(k[a] >> shift);
        boxes.insert(key);
      }
      est.levels.push_back(j);
      est.scales.push_back(std::ldexp(1.0, -j));
      est.counts.push_back(boxes.size());
    }
    return est;
  }

  double const erosion = lat.erosion >= 0.0 ? lat.erosion : 2.0 * A.diagonal();
  if (lat.side(j1) < 2.0 * erosion + A.cell_size())
    throw resolution_error("box side at level " + std::to_string(j1) +
                               " is below the grid resolution",
                           2.0 * erosion + A.cell_size());
  auto const centers = A.centers();
  for (int j = j0; j <= j1; ++j)
  {
    double const s = lat.side(j);
    std::unordered_set<std::uint64_t> boxes;
    for (auto const &p : centers)
    {
      std::uint64_t key = 0;
      bool deep = true;
      for (int a = 0; a < n; ++a)
      {
        double const u = (p(a) + 1.0) / s;
        double const fl = std::floor(u);
        double const depth = std::min(u - fl, fl + 1.0 - u) * s;
        deep = deep && depth >= erosion;
        key = (key << 21) | static_cast<std::uint64_t>(fl);
      }
      if (deep)
        boxes.insert(key);
    }
    est.levels.push_back(j);
    est.scales.push_back(s);
    est.counts.push_back(boxes.size());
  }
  return est;
}

/// Least-squares fit of ln nu against -ln delta over the given counts.
inline void fit_capacity(CapacityEstimate &est, int first, int last)
{
  int const m = last - first + 1;
  if (m < 3)
    throw precondition_error("capacity fit needs at least 3 usable scales");
  est.window_first = first;
  est.window_last = last;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  bool all_equal = true;
  for (int i = first; i <= last; ++i)
  {
    double const x = -std::log(est.scales[i]);
    double const y = std::log(double(est.counts[i]));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    all_equal = all_equal && est.counts[i] == est.counts[first];
  }
  if (all_equal)
  {
    est.flat = true;
    est.slope = 0.0;
    est.intercept = std::log(double(est.counts[first]));
    est.residual = 0.0;
    return;
  }
  est.slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  est.intercept = (sy - est.slope * sx) / m;
  double ss = 0.0;
  for (int i = first; i <= last; ++i)
  {
    double const r = std::log(double(est.counts[i])) -
                     (est.intercept - est.slope * std::log(est.scales[i]));
    ss += r * r;
  }
  est.residual = std::sqrt(ss / m);
}

/// Box counts plus the log-log slope. Scales within two dyadic levels of the
/// grid resolution (side < 4h) are left out of the fit.
inline CapacityEstimate limit_capacity(GridSet const &A, int j0, int j1,
                                       BoxLattice lat = BoxLattice::dyadic())
{
  auto est = box_counts(A, j0, j1, lat);
  double const limit = 4.0 * A.cell_size() * (1.0 - 1e-12);
  int last = -1;
  for (int i = 0; i < static_cast<int>(est.scales.size()); ++i)
    if (est.scales[i] >= limit)
      last = i;
  fit_capacity(est, 0, last);
  return est;
}

/// [-ln N / lambda_-, -ln N / lambda_+] for an OSC system with derivative
/// gains in [e^{lambda_-}, e^{lambda_+}].
inline std::pair<double, double> falconer_bracket(std::uint64_t N, double lambda_minus,
                                                  double lambda_plus)
{
  if (N < 1)
    throw domain_error("map count must be at least 1");
  if (!(lambda_minus <= lambda_plus && lambda_plus < 0.0))
    throw domain_error("need lambda_- <= lambda_+ < 0");
  double const l = std::log(double(N));
  return {-l / lambda_minus, -l / lambda_plus};
}

/// The unique d >= 0 with sum r_i^d = 1, by bisection to 1e-12.
inline double moran_dimension(std::vector<double> const &ratios)
{
  if (ratios.empty())
    throw domain_error("Moran equation needs at least one ratio");
  for (double r : ratios)
    if (!(r > 0.0 && r < 1.0))
      throw domain_error("contraction ratios must lie in (0,1)");
  auto f = [&](double d) {
    double s = 0.0;
    for (double r : ratios)
      s += std::pow(r, d);
    return s;
  };
  if (ratios.size() == 1)
    return 0.0;
  double lo = 0.0, hi = 1.0;
  while (f(hi) > 1.0)
    hi *= 2.0;
  while (hi - lo > 1e-12)
  {
    double const mid = 0.5 * (lo + hi);
    (f(mid) > 1.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

struct DimensionBracket
{
  int n = 0;
  std::uint64_t N = 0;
  double lower = 0.0;
  double upper = 0.0;
  double k = 0.0, K = 0.0, Q = 0.0, D = 0.0;
};

/// lower = ln N/(nk + K + 3D + 3Q), upper = ln N/(nk - D - Q).
inline DimensionBracket bracket_from_ingredients(int n, std::uint64_t N, double k, double K,
                                                 double Q, double D)
{
  if (n < 1 || N < 1)
    throw domain_error("bracket needs n >= 1 and N >= 1");
  double const top = n * k - D - Q;
  if (!(top > 0.0))
    throw bracket_degenerate("nk = " + std::to_string(n * k) +
                             " does not exceed D(n) + Q(n) = " + std::to_string(D + Q));
  DimensionBracket b{n, N, 0.0, 0.0, k, K, Q, D};
  double const l = std::log(double(N));
  b.lower = l / (n * k + K + 3.0 * D + 3.0 * Q);
  b.upper = l / top;
  return b;
}

struct HdimResult
{
  DimensionBracket bracket;
  DynamicCover cover;
  DisjointSubsystem disjoint;
  DistortionReport distortion;
};

/// Dynamic cover at level n, greedy disjoint subsystem, and the bracket.
inline HdimResult hdim_bracket(System const &F, int n, double slack = 1.01,
                               Sampling const &s = {}, Reading reading = Reading::open)
{
  HdimResult r;
  r.distortion = distortion_report(F, n, s);
  auto const c = contraction_constants(F, slack);
  double const Q = r.distortion.Q_at(n), D = r.distortion.D_at(n);
  if (!(n * c.k > D + Q))
    throw bracket_degenerate("nk does not exceed D(n) + Q(n) at n = " + std::to_string(n));
  r.cover = build_dynamic_cover(F, n, c, Q, D);
  r.disjoint = maximal_disjoint(F, r.cover, reading);
  r.bracket = bracket_from_ingredients(n, r.disjoint.N, c.k, c.K, Q, D);
  return r;
}

struct CapacityProbe
{
  CapacityEstimate capacity;
  HdimResult hdim;
  int n_used = 0;
  double tol = 0.0;
  bool pass = false;
};

/// Limit capacity of the attractor against the dimension bracket at the
/// largest feasible level <= n. tol = fit rms residual + 0.03.
inline CapacityProbe capacity_equals_hdim_probe(System const &F, int n, GridSet const &att,
                                                int j0, int j1,
                                                BoxLattice lat = BoxLattice::dyadic(),
                                                double slack = 1.01)
{
  auto const diag = semi_conformality_diagnostic(F, std::max(2, std::min(n, 6)));
  if (diag.verdict != Conformality::conformal && diag.verdict != Conformality::decreasing)
    throw precondition_error("capacity probe needs a semi-conformal system, got " +
                             to_string(diag.verdict));
  CapacityProbe p;
  p.capacity = limit_capacity(att, j0, j1, lat);
  for (int m = n; m >= 1; --m)
  {
    try
    {
      p.hdim = hdim_bracket(F, m, slack);
      p.n_used = m;
      break;
    }
    catch (cap_error const &)
    {
    }
    catch (bracket_degenerate const &)
    {
    }
  }
  if (p.n_used == 0)
    throw precondition_error("no feasible cover level");
  p.tol = p.capacity.residual + 0.03;
  p.pass = p.capacity.slope >= p.hdim.bracket.lower - p.tol &&
           p.capacity.slope <= p.hdim.bracket.upper + p.tol;
  return p;
}

} // namespace lsf
