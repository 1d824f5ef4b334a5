#pragma once

// Compact subsets of the closed unit ball: dyadic occupancy grids and finite
// point samples, with the Hausdorff metric, neighborhoods and diameters.

#include "lsf/types.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <span>
#include <unordered_map>
#include <variant>
#include <vector>

namespace lsf
{

using Coords = std::array<std::int64_t, 3>;

/// Finest supported grid level per ambient dimension (memory bound 2^{n(m+1)}).
inline int max_grid_level(int dim)
{
  switch (dim)
  {
  case 1:
    return 24;
  case 2:
    return 12;
  case 3:
    return 8;
  }
  check_dim(dim);
  return 0;
}

/// Occupied cells of the dyadic grid on [-1,1]^n at level m; cell width 2^-m.
/// Cells whose closed box misses the closed unit ball are not representable.
/// The cell list is sorted and duplicate-free, so equality is structural.
class GridSet
{
public:
  using Index = std::uint64_t;

  GridSet() = default;

  GridSet(int dim, int level, std::vector<Index> cells)
      : dim_(dim), level_(level), cells_(std::move(cells))
  {
    validate_shape(dim, level);
    std::sort(cells_.begin(), cells_.end());
    cells_.erase(std::unique(cells_.begin(), cells_.end()), cells_.end());
    Index const total = total_cells();
    for (Index c : cells_)
    {
      if (c >= total)
        throw domain_error("grid cell index out of range");
      if (!in_domain(coords(c)))
        throw domain_error("grid cell lies outside the unit ball");
    }
  }

  static GridSet full(int dim, int level)
  {
    GridSet g(dim, level, {});
    Index const total = g.total_cells();
    for (Index c = 0; c < total; ++c)
      if (g.in_domain(g.coords(c)))
        g.cells_.push_back(c);
    return g;
  }

  /// Cells containing the given points (half-open cells, clamped to the grid).
  static GridSet from_points(int dim, int level, std::span<Vec const> points)
  {
    GridSet g(dim, level, {});
    g.cells_.reserve(points.size());
    for (auto const &p : points)
    {
      if (p.size() != dim)
        throw representation_mismatch("point dimension does not match grid");
      g.cells_.push_back(g.locate(p));
    }
    std::sort(g.cells_.begin(), g.cells_.end());
    g.cells_.erase(std::unique(g.cells_.begin(), g.cells_.end()), g.cells_.end());
    return g;
  }

  int dim() const { return dim_; }
  int level() const { return level_; }
  std::int64_t width() const { return std::int64_t{1} << (level_ + 1); }
  double cell_size() const { return std::ldexp(1.0, -level_); }
  double cell_volume() const { return std::pow(cell_size(), dim_); }
  double diagonal() const { return cell_size() * std::sqrt(double(dim_)); }
  double half_diagonal() const { return 0.5 * diagonal(); }
  Index total_cells() const
  {
    return Index{1} << (static_cast<unsigned>(dim_) * (level_ + 1));
  }

  std::vector<Index> const &cells() const { return cells_; }
  std::size_t size() const { return cells_.size(); }
  bool empty() const { return cells_.empty(); }

  bool contains(Index c) const
  {
    return std::binary_search(cells_.begin(), cells_.end(), c);
  }

  Coords coords(Index c) const
  {
    Coords out{0, 0, 0};
    auto const w = static_cast<Index>(width());
    for (int a = dim_ - 1; a >= 0; --a)
    {
      out[a] = static_cast<std::int64_t>(c % w);
      c /= w;
    }
    return out;
  }

  Index index(Coords const &k) const
  {
    Index c = 0;
    auto const w = static_cast<Index>(width());
    for (int a = 0; a < dim_; ++a)
      c = c * w + static_cast<Index>(k[a]);
    return c;
  }

  bool in_range(Coords const &k) const
  {
    for (int a = 0; a < dim_; ++a)
      if (k[a] < 0 || k[a] >= width())
        return false;
    return true;
  }

  /// Closed cell box meets the closed unit ball.
  bool in_domain(Coords const &k) const
  {
    double const h = cell_size();
    double r2 = 0.0;
    for (int a = 0; a < dim_; ++a)
    {
      double const lo = -1.0 + k[a] * h;
      double const hi = lo + h;
      double const near = std::clamp(0.0, lo, hi);
      r2 += near * near;
    }
    return r2 <= 1.0 + 1e-12;
  }

  Vec center(Index c) const { return center(coords(c)); }

  Vec center(Coords const &k) const
  {
    Vec v(dim_);
    double const h = cell_size();
    for (int a = 0; a < dim_; ++a)
      v(a) = -1.0 + (k[a] + 0.5) * h;
    return v;
  }

  Index locate(Vec const &p) const
  {
    Coords k{0, 0, 0};
    double const h = cell_size();
    for (int a = 0; a < dim_; ++a)
      k[a] = std::clamp<std::int64_t>(
          static_cast<std::int64_t>(std::floor((p(a) + 1.0) / h)), 0,
          width() - 1);
    return index(k);
  }

  std::vector<Vec> centers() const
  {
    std::vector<Vec> out;
    out.reserve(cells_.size());
    for (Index c : cells_)
      out.push_back(center(c));
    return out;
  }

  friend bool operator==(GridSet const &a, GridSet const &b)
  {
    return a.dim_ == b.dim_ && a.level_ == b.level_ && a.cells_ == b.cells_;
  }

  static void validate_shape(int dim, int level)
  {
    check_dim(dim);
    if (level < 0 || level > max_grid_level(dim))
      throw domain_error("grid level " + std::to_string(level) +
                         " unsupported in dimension " + std::to_string(dim));
  }

private:
  int dim_ = 1;
  int level_ = 0;
  std::vector<Index> cells_;
};

/// Dense occupancy scratch buffer for building grid sets.
class CellMarks
{
public:
  explicit CellMarks(GridSet const &shape)
      : shape_(shape.dim(), shape.level(), {}), marks_(shape.total_cells(), 0)
  {}

  void mark(GridSet::Index c) { marks_[c] = 1; }
  bool marked(GridSet::Index c) const { return marks_[c] != 0; }

  /// Marks every in-domain cell whose open box meets the closed box [lo, hi].
  void mark_box(Vec const &lo, Vec const &hi)
  {
    int const n = shape_.dim();
    double const h = shape_.cell_size();
    std::int64_t const w = shape_.width();
    Coords k0{0, 0, 0}, k1{0, 0, 0};
    // Box faces within rounding noise of a grid line are snapped onto it, so
    // touching a neighbor cell only along a face never marks it.
    auto snap = [](double u) {
      double const r = std::round(u);
      return std::abs(u - r) < 1e-9 ? r : u;
    };
    for (int a = 0; a < n; ++a)
    {
      k0[a] = static_cast<std::int64_t>(std::floor(snap((lo(a) + 1.0) / h)));
      k1[a] = static_cast<std::int64_t>(std::ceil(snap((hi(a) + 1.0) / h))) - 1;
      k1[a] = std::max(k1[a], k0[a]);
      k0[a] = std::max<std::int64_t>(k0[a], 0);
      k1[a] = std::min<std::int64_t>(k1[a], w - 1);
      if (k0[a] > k1[a])
        return;
    }
    Coords k{0, 0, 0};
    for (k[0] = k0[0]; k[0] <= k1[0]; ++k[0])
      for (k[1] = k0[1]; k[1] <= (n > 1 ? k1[1] : 0); ++k[1])
        for (k[2] = k0[2]; k[2] <= (n > 2 ? k1[2] : 0); ++k[2])
        {
          auto const c = shape_.index(k);
          if (!marks_[c] && shape_.in_domain(k))
            marks_[c] = 1;
        }
  }

  GridSet to_grid() const
  {
    std::vector<GridSet::Index> cells;
    for (GridSet::Index c = 0; c < marks_.size(); ++c)
      if (marks_[c])
        cells.push_back(c);
    GridSet g = shape_;
    return GridSet(g.dim(), g.level(), std::move(cells));
  }

private:
  GridSet shape_;
  std::vector<std::uint8_t> marks_;
};

/// Finite sample of a compact set; an eps-net of it with eps = resolution.
struct PointCloud
{
  int dim = 1;
  std::vector<Vec> points;
  double resolution = 1e-12;

  PointCloud() = default;
  PointCloud(int d, std::vector<Vec> pts, double res)
      : dim(d), points(std::move(pts)), resolution(res)
  {
    check_dim(dim);
    if (!(resolution > 0.0))
      throw domain_error("point cloud resolution must be positive");
    for (auto const &p : points)
    {
      if (p.size() != dim)
        throw representation_mismatch("point dimension does not match cloud");
      if (p.norm() > 1.0 + 1e-12)
        throw domain_error("point cloud point outside the unit ball");
    }
  }

  bool empty() const { return points.empty(); }
  std::size_t size() const { return points.size(); }
};

struct Ball
{
  Vec center;
  double radius = 1.0;

  Ball() = default;
  Ball(Vec c, double r) : center(std::move(c)), radius(r)
  {
    if (!(radius > 0.0))
      throw domain_error("ball radius must be positive");
  }

  double diameter() const { return 2.0 * radius; }
};

using SetRep = std::variant<GridSet, PointCloud>;

inline int dim_of(SetRep const &s)
{
  return std::visit([](auto const &x) {
    if constexpr (std::is_same_v<std::decay_t<decltype(x)>, GridSet>)
      return x.dim();
    else
      return x.dim;
  }, s);
}

/// Bucketed nearest-neighbor queries over a fixed point set.
class NearestIndex
{
public:
  explicit NearestIndex(std::vector<Vec> points) : points_(std::move(points))
  {
    if (points_.empty())
      throw empty_set_error("nearest-neighbor index over an empty set");
    dim_ = static_cast<int>(points_.front().size());
    Vec lo = points_.front(), hi = points_.front();
    for (auto const &p : points_)
    {
      lo = lo.cwiseMin(p);
      hi = hi.cwiseMax(p);
    }
    double vol = 1.0;
    double extent = 0.0;
    for (int a = 0; a < dim_; ++a)
    {
      extent = std::max(extent, hi(a) - lo(a));
      vol *= std::max(hi(a) - lo(a), 1e-9);
    }
    bucket_ = std::pow(2.0 * vol / double(points_.size()), 1.0 / dim_);
    bucket_ = std::clamp(bucket_, std::max(extent, 1e-9) * 1e-6,
                         std::max(extent, 1e-9));
    origin_ = lo;
    for (int a = 0; a < dim_; ++a)
    {
      kmin_[a] = 0;
      kmax_[a] = key_coord(hi(a), a);
    }
    for (std::uint32_t i = 0; i < points_.size(); ++i)
      buckets_[pack(bucket_of(points_[i]))].push_back(i);
  }

  double distance(Vec const &q) const { return std::sqrt(nearest2(q).second); }

  std::size_t nearest(Vec const &q) const { return nearest2(q).first; }

private:
  std::int64_t key_coord(double x, int a) const
  {
    return static_cast<std::int64_t>(std::floor((x - origin_(a)) / bucket_));
  }

  Coords bucket_of(Vec const &p) const
  {
    Coords k{0, 0, 0};
    for (int a = 0; a < dim_; ++a)
      k[a] = std::clamp(key_coord(p(a), a), kmin_[a], kmax_[a]);
    return k;
  }

  static std::uint64_t pack(Coords const &k)
  {
    return (static_cast<std::uint64_t>(k[0]) << 42) |
           (static_cast<std::uint64_t>(k[1]) << 21) |
           static_cast<std::uint64_t>(k[2]);
  }

  std::pair<std::size_t, double> nearest2(Vec const &q) const
  {
    Coords qk{0, 0, 0};
    std::int64_t r0 = 0, rmax = 0;
    for (int a = 0; a < dim_; ++a)
    {
      qk[a] = key_coord(q(a), a);
      std::int64_t const off =
          qk[a] < kmin_[a] ? kmin_[a] - qk[a]
                           : (qk[a] > kmax_[a] ? qk[a] - kmax_[a] : 0);
      r0 = std::max(r0, off);
      rmax = std::max({rmax, std::abs(qk[a] - kmin_[a]),
                       std::abs(qk[a] - kmax_[a])});
    }
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_i = 0;
    for (std::int64_t r = r0; r <= rmax; ++r)
    {
      Coords lo{0, 0, 0}, hi{0, 0, 0};
      for (int a = 0; a < dim_; ++a)
      {
        lo[a] = std::max(qk[a] - r, kmin_[a]);
        hi[a] = std::min(qk[a] + r, kmax_[a]);
      }
      Coords k{0, 0, 0};
      for (k[0] = lo[0]; k[0] <= hi[0]; ++k[0])
        for (k[1] = lo[1]; k[1] <= hi[1]; ++k[1])
          for (k[2] = lo[2]; k[2] <= hi[2]; ++k[2])
          {
            std::int64_t cheb = 0;
            for (int a = 0; a < dim_; ++a)
              cheb = std::max(cheb, std::abs(k[a] - qk[a]));
            if (cheb != r)
              continue;
            auto it = buckets_.find(pack(k));
            if (it == buckets_.end())
              continue;
            for (auto i : it->second)
            {
              double const d2 = (points_[i] - q).squaredNorm();
              if (d2 < best || (d2 == best && i < best_i))
              {
                best = d2;
                best_i = i;
              }
            }
          }
      double const reach = double(r) * bucket_;
      if (best <= reach * reach)
        break;
    }
    return {best_i, best};
  }

  std::vector<Vec> points_;
  int dim_ = 1;
  double bucket_ = 1.0;
  Vec origin_;
  Coords kmin_{0, 0, 0}, kmax_{0, 0, 0};
  std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> buckets_;
};

namespace detail
{

inline constexpr std::size_t brute_force_limit = 10000;

inline double directed_distance(std::vector<Vec> const &from,
                                std::vector<Vec> const &to)
{
  double worst = 0.0;
  if (from.size() <= brute_force_limit && to.size() <= brute_force_limit)
  {
    for (auto const &a : from)
    {
      double best = std::numeric_limits<double>::infinity();
      for (auto const &b : to)
        best = std::min(best, (a - b).squaredNorm());
      worst = std::max(worst, best);
    }
    return std::sqrt(worst);
  }
  NearestIndex index(to);
  for (auto const &a : from)
    worst = std::max(worst, index.distance(a));
  return worst;
}

inline void require_same(GridSet const &a, GridSet const &b)
{
  if (a.dim() != b.dim())
    throw representation_mismatch("grid dimensions differ");
  if (a.level() != b.level())
    throw representation_mismatch("grid levels differ");
}

inline void require_same(PointCloud const &a, PointCloud const &b)
{
  if (a.dim != b.dim)
    throw representation_mismatch("point cloud dimensions differ");
}

} // namespace detail

/// Exact max-min Hausdorff distance between two finite samples.
inline Distance hausdorff_distance(PointCloud const &a, PointCloud const &b)
{
  detail::require_same(a, b);
  if (a.empty() || b.empty())
    throw empty_set_error("Hausdorff distance of an empty point cloud");
  double const d = std::max(detail::directed_distance(a.points, b.points),
                            detail::directed_distance(b.points, a.points));
  return {d, 0.0};
}

/// Distance between cell centers, reported with a one-cell-diagonal error bar.
inline Distance hausdorff_distance(GridSet const &a, GridSet const &b)
{
  detail::require_same(a, b);
  if (a.empty() || b.empty())
    throw empty_set_error("Hausdorff distance of an empty grid set");
  if (a == b)
    return {0.0, a.diagonal()};
  auto const ca = a.centers();
  auto const cb = b.centers();
  double const d = std::max(detail::directed_distance(ca, cb),
                            detail::directed_distance(cb, ca));
  return {d, a.diagonal()};
}

inline Distance hausdorff_distance(SetRep const &a, SetRep const &b)
{
  if (a.index() != b.index())
    throw representation_mismatch("Hausdorff distance between different "
                                  "set representations");
  return std::visit(
      [&](auto const &x) -> Distance {
        using T = std::decay_t<decltype(x)>;
        return hausdorff_distance(x, std::get<T>(b));
      },
      a);
}

/// Cells whose center lies within eps of an occupied center, clipped to the
/// ball. Center-to-center distances keep N(N(A,e1),e2) inside N(A,e1+e2).
inline GridSet epsilon_neighborhood(GridSet const &a, double eps)
{
  if (!(eps >= 0.0))
    throw domain_error("neighborhood radius must be nonnegative");
  if (eps == 0.0 || a.empty())
    return a;
  int const n = a.dim();
  double const r = eps / a.cell_size();
  double const r2 = r * r * (1.0 + 1e-12);
  auto const reach = static_cast<std::int64_t>(std::floor(r * (1.0 + 1e-12)));

  std::vector<Coords> offsets;
  Coords k{0, 0, 0};
  for (k[0] = -reach; k[0] <= reach; ++k[0])
    for (k[1] = (n > 1 ? -reach : 0); k[1] <= (n > 1 ? reach : 0); ++k[1])
      for (k[2] = (n > 2 ? -reach : 0); k[2] <= (n > 2 ? reach : 0); ++k[2])
      {
        double const d2 = double(k[0] * k[0] + k[1] * k[1] + k[2] * k[2]);
        if (d2 <= r2)
          offsets.push_back(k);
      }

  CellMarks marks(a);
  double const stamp_cost = double(offsets.size()) * double(a.size());
  if (stamp_cost <= 8.0 * double(a.total_cells()))
  {
    for (auto c : a.cells())
    {
      Coords const base = a.coords(c);
      for (auto const &o : offsets)
      {
        Coords q{base[0] + o[0], base[1] + o[1], base[2] + o[2]};
        if (a.in_range(q) && a.in_domain(q))
          marks.mark(a.index(q));
      }
    }
    return marks.to_grid();
  }

  // Dense case: scan every domain cell against the occupied centers, in
  // integer cell units so both branches agree.
  std::vector<Vec> units;
  units.reserve(a.size());
  for (auto c : a.cells())
  {
    auto const kc = a.coords(c);
    Vec v(n);
    for (int i = 0; i < n; ++i)
      v(i) = double(kc[i]);
    units.push_back(v);
  }
  NearestIndex index(std::move(units));
  for (GridSet::Index c = 0; c < a.total_cells(); ++c)
  {
    auto const kc = a.coords(c);
    if (!a.in_domain(kc))
      continue;
    Vec v(n);
    for (int i = 0; i < n; ++i)
      v(i) = double(kc[i]);
    double const d = index.distance(v);
    if (std::round(d * d) <= r2)
      marks.mark(c);
  }
  return marks.to_grid();
}

/// Sample of N_eps(A) within the ball: the original points plus a lattice of
/// spacing matched to the cloud resolution.
inline PointCloud epsilon_neighborhood(PointCloud const &a, double eps)
{
  if (!(eps >= 0.0))
    throw domain_error("neighborhood radius must be nonnegative");
  if (eps == 0.0 || a.empty())
    return a;
  int const n = a.dim;
  double const spacing = 2.0 * a.resolution / std::sqrt(double(n));
  NearestIndex index(a.points);
  std::vector<Vec> out = a.points;
  auto const reach = static_cast<std::int64_t>(std::ceil(1.0 / spacing));
  Coords k{0, 0, 0};
  for (k[0] = -reach; k[0] <= reach; ++k[0])
    for (k[1] = (n > 1 ? -reach : 0); k[1] <= (n > 1 ? reach : 0); ++k[1])
      for (k[2] = (n > 2 ? -reach : 0); k[2] <= (n > 2 ? reach : 0); ++k[2])
      {
        Vec p(n);
        for (int i = 0; i < n; ++i)
          p(i) = double(k[i]) * spacing;
        if (p.norm() > 1.0)
          continue;
        if (index.distance(p) <= eps)
          out.push_back(p);
      }
  return PointCloud(n, std::move(out), a.resolution);
}

inline SetRep epsilon_neighborhood(SetRep const &a, double eps)
{
  return std::visit([&](auto const &x) -> SetRep {
    return epsilon_neighborhood(x, eps);
  }, a);
}

/// Exact diameter over the samples.
inline double diameter(PointCloud const &a)
{
  if (a.empty())
    throw empty_set_error("diameter of an empty point cloud");
  double best = 0.0;
  for (std::size_t i = 0; i < a.points.size(); ++i)
    for (std::size_t j = i + 1; j < a.points.size(); ++j)
      best = std::max(best, (a.points[i] - a.points[j]).squaredNorm());
  return std::sqrt(best);
}

/// Farthest distance between cell corners; an upper estimate of the diameter
/// of the represented set.
inline double diameter(GridSet const &a)
{
  if (a.empty())
    throw empty_set_error("diameter of an empty grid set");
  int const n = a.dim();
  // Extreme cells along every line parallel to axis 0 hold the farthest pair.
  std::unordered_map<std::uint64_t, std::pair<std::int64_t, std::int64_t>> rows;
  for (auto c : a.cells())
  {
    auto const k = a.coords(c);
    std::uint64_t const key =
        (static_cast<std::uint64_t>(k[1]) << 32) | static_cast<std::uint64_t>(k[2]);
    auto [it, fresh] = rows.try_emplace(key, k[0], k[0]);
    if (!fresh)
    {
      it->second.first = std::min(it->second.first, k[0]);
      it->second.second = std::max(it->second.second, k[0]);
    }
  }
  std::vector<Coords> cand;
  for (auto const &[key, ext] : rows)
  {
    std::int64_t const k1 = static_cast<std::int64_t>(key >> 32);
    std::int64_t const k2 = static_cast<std::int64_t>(key & 0xffffffffu);
    cand.push_back({ext.first, k1, k2});
    if (ext.second != ext.first)
      cand.push_back({ext.second, k1, k2});
  }
  std::sort(cand.begin(), cand.end());
  std::int64_t best = 0;
  for (std::size_t i = 0; i < cand.size(); ++i)
    for (std::size_t j = i; j < cand.size(); ++j)
    {
      std::int64_t s = 0;
      for (int ax = 0; ax < n; ++ax)
      {
        std::int64_t const d = std::abs(cand[i][ax] - cand[j][ax]) + 1;
        s += d * d;
      }
      best = std::max(best, s);
    }
  return std::sqrt(double(best)) * a.cell_size();
}

inline double diameter(SetRep const &a)
{
  return std::visit([](auto const &x) { return diameter(x); }, a);
}

inline GridSet set_union(std::span<GridSet const> parts)
{
  if (parts.empty())
    throw empty_set_error("union of no parts");
  std::vector<GridSet::Index> cells;
  for (auto const &p : parts)
  {
    detail::require_same(parts.front(), p);
    cells.insert(cells.end(), p.cells().begin(), p.cells().end());
  }
  return GridSet(parts.front().dim(), parts.front().level(), std::move(cells));
}

inline PointCloud set_union(std::span<PointCloud const> parts)
{
  if (parts.empty())
    throw empty_set_error("union of no parts");
  std::vector<Vec> pts;
  double res = 0.0;
  for (auto const &p : parts)
  {
    detail::require_same(parts.front(), p);
    pts.insert(pts.end(), p.points.begin(), p.points.end());
    res = std::max(res, p.resolution);
  }
  return PointCloud(parts.front().dim, std::move(pts), res);
}

/// Hd(U A_i, U B_i) - sup_i Hd(A_i, B_i), nonpositive up to the reported
/// representation uncertainty.
template <class Set>
Distance union_subadditivity_check(std::span<Set const> parts_a,
                                   std::span<Set const> parts_b)
{
  if (parts_a.size() != parts_b.size())
    throw domain_error("part lists must have equal length");
  double sup = 0.0;
  double unc = 0.0;
  for (std::size_t i = 0; i < parts_a.size(); ++i)
  {
    auto const d = hausdorff_distance(parts_a[i], parts_b[i]);
    sup = std::max(sup, d.value);
    unc = std::max(unc, d.uncertainty);
  }
  auto const whole = hausdorff_distance(set_union(parts_a), set_union(parts_b));
  return {whole.value - sup, whole.uncertainty + unc};
}

/// eps-net of the closed unit ball: lattice points near the ball, projected
/// radially onto it.
inline std::vector<Vec> ball_net(int dim, double eps)
{
  check_dim(dim);
  if (!(eps > 0.0))
    throw domain_error("net spacing must be positive");
  double const s = 2.0 * eps / std::sqrt(double(dim));
  auto const reach = static_cast<std::int64_t>(std::ceil((1.0 + eps) / s));
  std::vector<Vec> out;
  Coords k{0, 0, 0};
  for (k[0] = -reach; k[0] <= reach; ++k[0])
    for (k[1] = (dim > 1 ? -reach : 0); k[1] <= (dim > 1 ? reach : 0); ++k[1])
      for (k[2] = (dim > 2 ? -reach : 0); k[2] <= (dim > 2 ? reach : 0); ++k[2])
      {
        Vec p(dim);
        for (int a = 0; a < dim; ++a)
          p(a) = double(k[a]) * s;
        double const r = p.norm();
        if (r > 1.0 + eps)
          continue;
        if (r > 1.0)
          p /= r;
        out.push_back(p);
      }
  return out;
}

/// Points of the unit sphere with spacing about eps.
inline std::vector<Vec> sphere_net(int dim, double eps)
{
  check_dim(dim);
  std::vector<Vec> out;
  if (dim == 1)
    return {make_vec({-1.0}), make_vec({1.0})};
  if (dim == 2)
  {
    int const m = std::max(8, static_cast<int>(std::ceil(2.0 * M_PI / eps)));
    for (int i = 0; i < m; ++i)
    {
      double const th = 2.0 * M_PI * i / m;
      out.push_back(make_vec({std::cos(th), std::sin(th)}));
    }
    return out;
  }
  int const m = std::max(32, static_cast<int>(std::ceil(4.0 * M_PI / (eps * eps))));
  double const golden = M_PI * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < m; ++i)
  {
    double const z = 1.0 - 2.0 * (i + 0.5) / m;
    double const rho = std::sqrt(1.0 - z * z);
    double const th = golden * i;
    out.push_back(make_vec({rho * std::cos(th), rho * std::sin(th), z}));
  }
  return out;
}

/// Unit directions up to sign (half sphere), used for directional sampling.
inline std::vector<Vec> direction_net(int dim, double eps)
{
  auto all = sphere_net(dim, eps);
  if (dim == 1)
    return {make_vec({1.0})};
  std::vector<Vec> out;
  for (auto &v : all)
  {
    int a = dim - 1;
    while (a > 0 && std::abs(v(a)) < 1e-15)
      --a;
    if (v(a) >= 0.0)
      out.push_back(v);
  }
  return out;
}

inline Vec random_unit(std::mt19937_64 &rng, int dim)
{
  std::normal_distribution<double> g(0.0, 1.0);
  Vec v(dim);
  do
  {
    for (int a = 0; a < dim; ++a)
      v(a) = g(rng);
  } while (v.norm() < 1e-12);
  return v / v.norm();
}

inline Vec random_in_ball(std::mt19937_64 &rng, int dim, double radius = 1.0)
{
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Vec const dir = random_unit(rng, dim);
  return dir * (radius * std::pow(u(rng), 1.0 / dim));
}

} // namespace lsf
