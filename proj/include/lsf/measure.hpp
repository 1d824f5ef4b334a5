#pragma once

// Lebesgue-measure brackets of attractor grids, boundary capacity, the
// modulus inequality, and the upper semi-continuity probe over a family.

#include "lsf/dimension.hpp"
#include "lsf/families.hpp"

namespace lsf
{

struct MeasureBracket
{
  double inner = 0.0;  // volume certainly inside the attractor
  double outer = 0.0;  // volume of the occupied cells (a superset)
  int level = 0;
  std::size_t boundary_cells = 0;
  double cell_volume = 0.0;
};

/// Occupied cells with an axis neighbor that is empty or off the grid.
inline GridSet boundary_cells(GridSet const &A)
{
  std::vector<GridSet::Index> out;
  int const n = A.dim();
  for (auto c : A.cells())
  {
    auto const k = A.coords(c);
    bool edge = false;
    for (int a = 0; a < n && !edge; ++a)
      for (int s : {-1, 1})
      {
        Coords q = k;
        q[a] += s;
        if (!A.in_range(q) || !A.contains(A.index(q)))
        {
          edge = true;
          break;
        }
      }
    if (edge)
      out.push_back(c);
  }
  return GridSet(A.dim(), A.level(), std::move(out));
}

namespace detail
{

// Merged closed intervals; pieces closer than touch_tol are joined.
inline std::vector<std::pair<double, double>> merge_intervals(std::vector<std::pair<double, double>> v)
{
  std::sort(v.begin(), v.end());
  std::vector<std::pair<double, double>> out;
  for (auto const &iv : v)
  {
    if (!out.empty() && iv.first <= out.back().second + touch_tol)
      out.back().second = std::max(out.back().second, iv.second);
    else
      out.push_back(iv);
  }
  return out;
}

inline bool interval_covered(std::vector<std::pair<double, double>> const &merged, double a, double b)
{
  auto it = std::upper_bound(merged.begin(), merged.end(), std::pair{a, std::numeric_limits<double>::infinity()});
  if (it == merged.begin())
    return false;
  --it;
  return it->first <= a + touch_tol && it->second >= b - touch_tol;
}

// 1-D sub-invariance pruning with exact image intervals.
inline std::vector<GridSet::Index> inner_cells_1d(GridSet const &A, System const &F)
{
  std::vector<GridSet::Index> S = A.cells();
  double const h = A.cell_size();
  while (true)
  {
    std::vector<std::pair<double, double>> images;
    images.reserve(S.size() * F.size());
    // Contiguous runs of cells give fewer, longer intervals.
    std::vector<std::pair<double, double>> runs;
    for (auto c : S)
    {
      double const a = -1.0 + double(c) * h;
      if (!runs.empty() && std::abs(runs.back().second - a) < 1e-15)
        runs.back().second = a + h;
      else
        runs.emplace_back(a, a + h);
    }
    for (auto const &f : F.maps())
      for (auto const &[a, b] : runs)
      {
        double const fa = f.eval(make_vec({a}))(0);
        double const fb = f.eval(make_vec({b}))(0);
        images.emplace_back(std::min(fa, fb), std::max(fa, fb));
      }
    auto const merged = merge_intervals(std::move(images));
    std::vector<GridSet::Index> next;
    for (auto c : S)
    {
      double const a = -1.0 + double(c) * h;
      if (interval_covered(merged, a, a + h))
        next.push_back(c);
    }
    if (next.size() == S.size())
      return next;
    S = std::move(next);
  }
}

// Box [lo, hi] lies in the union of the cells of S (marks), checked by the
// bounding cells of the box.
inline bool box_in_cells(GridSet const &A, CellMarks const &S, Vec const &lo, Vec const &hi)
{
  int const n = A.dim();
  double const h = A.cell_size();
  Coords k0{0, 0, 0}, k1{0, 0, 0};
  for (int a = 0; a < n; ++a)
  {
    k0[a] = static_cast<std::int64_t>(std::floor((lo(a) + 1.0) / h + 1e-9));
    k1[a] = static_cast<std::int64_t>(std::ceil((hi(a) + 1.0) / h - 1e-9)) - 1;
    if (k0[a] < 0 || k1[a] >= A.width())
      return false;
    k1[a] = std::max(k1[a], k0[a]);
  }
  Coords k{0, 0, 0};
  for (k[0] = k0[0]; k[0] <= k1[0]; ++k[0])
    for (k[1] = k0[1]; k[1] <= (n > 1 ? k1[1] : 0); ++k[1])
      for (k[2] = k0[2]; k[2] <= (n > 2 ? k1[2] : 0); ++k[2])
        if (!A.in_domain(k) || !S.marked(A.index(k)))
          return false;
  return true;
}

// Sub-box of a cell certified if, for some map, its preimage bounding box
// lies in S; otherwise split up to `depth` times.
inline bool subbox_certified(GridSet const &A, CellMarks const &S, System const &F,
                             std::vector<Mat> const &inv, Vec const &lo, Vec const &hi, int depth)
{
  int const n = A.dim();
  Vec const mid = 0.5 * (lo + hi);
  Vec const half = 0.5 * (hi - lo);
  for (std::size_t j = 0; j < F.size(); ++j)
  {
    Vec const pc = inv[j] * (mid - F[j].translation());
    Vec const ext = inv[j].cwiseAbs() * half;
    if (box_in_cells(A, S, pc - ext, pc + ext))
      return true;
  }
  if (depth == 0)
    return false;
  for (int corner = 0; corner < (1 << n); ++corner)
  {
    Vec sl(n), sh(n);
    for (int a = 0; a < n; ++a)
    {
      bool const up = (corner >> a) & 1;
      sl(a) = up ? mid(a) : lo(a);
      sh(a) = up ? hi(a) : mid(a);
    }
    if (!subbox_certified(A, S, F, inv, sl, sh, depth - 1))
      return false;
  }
  return true;
}

inline std::vector<GridSet::Index> inner_cells_affine(GridSet const &A, System const &F)
{
  std::vector<Mat> inv;
  for (auto const &f : F.maps())
    inv.push_back(f.matrix().inverse());
  std::vector<GridSet::Index> S = A.cells();
  double const h = A.cell_size();
  while (true)
  {
    CellMarks marks(A);
    for (auto c : S)
      marks.mark(c);
    std::vector<GridSet::Index> next;
    for (auto c : S)
    {
      Vec const ctr = A.center(c);
      Vec const lo = ctr.array() - 0.5 * h;
      Vec const hi = ctr.array() + 0.5 * h;
      if (subbox_certified(A, marks, F, inv, lo, hi, 2))
        next.push_back(c);
    }
    if (next.size() == S.size())
      return next;
    S = std::move(next);
  }
}

} // namespace detail

/// outer: occupied volume (the grid is already a superset of the attractor);
/// inner: the largest sub-invariant union U of cells (U inside F(U) forces
/// U inside the attractor), found by pruning to a fixed point. Non-affine
/// maps in 2-D/3-D report inner = 0.
inline MeasureBracket measure_bracket(GridSet const &A, System const &F)
{
  if (A.dim() != F.dim())
    throw representation_mismatch("grid and system dimensions differ");
  MeasureBracket m;
  m.level = A.level();
  m.cell_volume = A.cell_volume();
  m.outer = std::min(double(A.size()) * m.cell_volume, unit_ball_volume(A.dim()));
  m.boundary_cells = boundary_cells(A).size();
  if (A.empty())
    return m;
  std::vector<GridSet::Index> inner;
  if (A.dim() == 1)
    inner = detail::inner_cells_1d(A, F);
  else if (F.is_affine())
    inner = detail::inner_cells_affine(A, F);
  m.inner = std::min(double(inner.size()) * m.cell_volume, m.outer);
  return m;
}

/// Capacity of the boundary-cell set.
inline CapacityEstimate boundary_capacity(GridSet const &A, int j0, int j1,
                                          BoxLattice lat = BoxLattice::dyadic())
{
  if (A.empty())
    throw empty_set_error("boundary capacity of an empty set");
  return limit_capacity(boundary_cells(A), j0, j1, lat);
}

struct ModulusCheck
{
  double lhs = 0.0;
  double rhs = 0.0;
  double delta = 0.0;
  double hd = 0.0;
  bool pass = false;
};

/// mu(L1) <= mu(L0) + eps * Delta^{n-d} (outer measures), given
/// Hd(L1, L0) <= Delta and d above the boundary capacity of L0. The
/// inequality is only claimed for small Delta, so Delta is reported.
inline ModulusCheck modulus_check(GridSet const &L0, GridSet const &L1, double Delta, double d,
                                  double eps, double boundary_slope)
{
  if (!(Delta > 0.0) || !(eps > 0.0))
    throw domain_error("Delta and eps must be positive");
  auto const hd = hausdorff_distance(L1, L0);
  if (hd.lower() > Delta)
    throw precondition_error("Hd(L1, L0) = " + std::to_string(hd.value) + " exceeds Delta");
  if (!(d > boundary_slope))
    throw precondition_error("d must exceed the boundary capacity of L0");
  ModulusCheck out;
  out.delta = Delta;
  out.hd = hd.value;
  out.lhs = double(L1.size()) * L1.cell_volume();
  out.rhs = double(L0.size()) * L0.cell_volume() + eps * std::pow(Delta, L0.dim() - d);
  out.pass = out.lhs <= out.rhs;
  return out;
}

inline ModulusCheck modulus_check(GridSet const &L0, GridSet const &L1, double Delta, double d,
                                  double eps)
{
  int const m = L0.level();
  auto const b = boundary_capacity(L0, std::max(1, m - 8), m);
  return modulus_check(L0, L1, Delta, d, eps, b.slope);
}

/// The check with L1 = N_Delta(L0) along Delta_i = Delta_max * ratio^i.
inline std::vector<ModulusCheck> modulus_ladder(GridSet const &L0, double Delta_max, double ratio,
                                                int count, double d, double eps)
{
  int const m = L0.level();
  double const bslope = boundary_capacity(L0, std::max(1, m - 8), m).slope;
  std::vector<ModulusCheck> out;
  double Delta = Delta_max;
  for (int i = 0; i < count; ++i, Delta *= ratio)
  {
    if (Delta < L0.cell_size())
      break;
    auto const L1 = epsilon_neighborhood(L0, Delta);
    out.push_back(modulus_check(L0, L1, Delta + L0.diagonal(), d, eps, bslope));
  }
  return out;
}

struct MeasureProbeRow
{
  double t = 0.0;
  double d0 = 0.0;         // natural units
  double mu_inner = 0.0;   // natural units
  double mu_outer = 0.0;
  double hd_to_star = 0.0; // natural units
  bool contraction_ok = true;  // Hd(attractors) <= d0/(1-L) + slack
};

struct MeasureProbe
{
  double t_star = 0.0;
  double radius = 0.0;
  int level = 0;
  std::vector<MeasureProbeRow> rows;
  std::vector<double> skipped;  // parameters outside the family domain
  double mu_star = 0.0;
  double slack = 0.0;
  double worst_excess = 0.0;    // max mu_outer(t) - mu_outer(t*)
  bool pass = false;
};

/// Outer measure along a symmetric parameter grid around t*; asserts
/// mu_outer(t) <= mu_outer(t*) + slack with slack = collar volume at the
/// attractor error bound plus one cell per boundary cell.
inline MeasureProbe measure_semicontinuity_probe(FamilySpec const &family, double t_star,
                                                 double radius, int steps, int level)
{
  if (steps < 1)
    throw domain_error("probe needs at least one step");
  if (!family.in_domain(t_star))
    throw domain_error("t* outside the family domain");
  MeasureProbe pr;
  pr.t_star = t_star;
  pr.radius = radius;
  pr.level = level;
  auto const fr = family.frame();
  GridSet const shape(family.at(t_star).system().dim(), level, {});
  double const tol = 2.0 * shape.diagonal();

  auto const Fs = family.at(t_star).system();
  auto const star = attractor(Fs, tol, level);
  auto const mstar = measure_bracket(star.grid, Fs);
  pr.mu_star = fr.measure_to_natural(mstar.outer, Fs.dim());
  double const collar = double(epsilon_neighborhood(star.grid, star.hd_bound).size() -
                               star.grid.size()) *
                        star.grid.cell_volume();
  pr.slack = fr.measure_to_natural(collar + mstar.cell_volume * double(mstar.boundary_cells),
                                   Fs.dim());
  auto const sample = ball_sample(Fs.dim(), 1e-3);

  pr.pass = true;
  pr.worst_excess = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < steps; ++i)
  {
    double const t = steps == 1 ? t_star : t_star - radius + 2.0 * radius * i / (steps - 1);
    if (!family.in_domain(t))
    {
      pr.skipped.push_back(t);
      continue;
    }
    auto const F = family.at(t).system();
    auto const a = attractor(F, tol, level);
    auto const mb = measure_bracket(a.grid, F);
    MeasureProbeRow row;
    row.t = t;
    auto const d0 = d0_distance(F, Fs, sample);
    row.d0 = fr.length_to_natural(d0.value);
    row.mu_inner = fr.measure_to_natural(mb.inner, F.dim());
    row.mu_outer = fr.measure_to_natural(mb.outer, F.dim());
    auto const hd = hausdorff_distance(a.grid, star.grid);
    row.hd_to_star = fr.length_to_natural(hd.value);
    double const L = std::max(F.lipschitz(), Fs.lipschitz());
    row.contraction_ok = hd.value <= (d0.value + d0.uncertainty) / (1.0 - L) + a.hd_bound +
                                         star.hd_bound + hd.uncertainty;
    pr.worst_excess = std::max(pr.worst_excess, row.mu_outer - pr.mu_star);
    if (row.mu_outer > pr.mu_star + pr.slack)
      pr.pass = false;
    pr.rows.push_back(row);
  }
  return pr;
}

} // namespace lsf
