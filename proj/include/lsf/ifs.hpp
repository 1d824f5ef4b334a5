#pragma once

// Contraction maps, finite systems, word compositions, the Hutchinson
// operator and attractor iteration.

#include "lsf/geometry.hpp"
#include "lsf/parallel.hpp"

#include <Eigen/SVD>

#include <compare>
#include <memory>
#include <optional>

namespace lsf
{

inline Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 3, 1> singular_values(Mat const &m)
{
  Eigen::JacobiSVD<Mat> svd(m);
  return svd.singularValues();
}

inline double sigma_max(Mat const &m) { return singular_values(m)(0); }

inline double sigma_min(Mat const &m)
{
  auto const s = singular_values(m);
  return s(s.size() - 1);
}

/// Monomial term coef * prod x_i^{exps_i}; coef is an n-vector (a scalar in 1-D).
struct PolyTerm
{
  std::array<int, 3> exps{0, 0, 0};
  Vec coef;
};

class ContractionMap
{
public:
  enum class Kind
  {
    affine,
    perturbed,
    composite
  };

  static ContractionMap affine(Mat A, Vec b)
  {
    ContractionMap f;
    f.kind_ = Kind::affine;
    f.A_ = std::move(A);
    f.b_ = std::move(b);
    f.certify();
    return f;
  }

  static ContractionMap perturbed(Mat A, Vec b, std::vector<PolyTerm> terms)
  {
    ContractionMap f;
    f.kind_ = terms.empty() ? Kind::affine : Kind::perturbed;
    f.A_ = std::move(A);
    f.b_ = std::move(b);
    f.terms_ = std::move(terms);
    f.certify();
    return f;
  }

  /// parts[0] applied first. Constants follow the chain rule bounds.
  static ContractionMap composite(std::vector<ContractionMap> parts)
  {
    if (parts.empty())
      throw domain_error("composite map needs at least one part");
    ContractionMap f;
    f.kind_ = Kind::composite;
    f.dim_ = parts.front().dim();
    f.lip_ = 1.0;
    f.smin_ = 1.0;
    f.holder_ = 0.0;
    for (auto const &p : parts)
    {
      if (p.dim() != f.dim_)
        throw representation_mismatch("composite parts differ in dimension");
      // H(g o f) <= H_g L_f^2 + L_g H_f
      f.holder_ = p.holder_ * f.lip_ * f.lip_ + p.lip_ * f.holder_;
      f.lip_ *= p.lip_;
      f.smin_ *= p.smin_;
    }
    f.parts_ = std::move(parts);
    return f;
  }

  Kind kind() const { return kind_; }
  bool is_affine() const { return kind_ == Kind::affine; }
  int dim() const { return dim_; }
  Mat const &matrix() const { return A_; }
  Vec const &translation() const { return b_; }
  std::vector<PolyTerm> const &terms() const { return terms_; }

  /// Upper bound on sup ||Df|| over the ball.
  double lipschitz() const { return lip_; }
  /// Lower bound on inf sigma_min(Df) over the ball.
  double sigma_min_bound() const { return smin_; }
  /// Upper bound on sup ||(Df)^{-1}||.
  double inverse_norm_bound() const { return 1.0 / smin_; }
  double holder_alpha() const { return 1.0; }
  double holder_const() const { return holder_; }

  Vec eval(Vec const &x) const
  {
    switch (kind_)
    {
    case Kind::affine:
      return A_ * x + b_;
    case Kind::perturbed:
    {
      Vec y = A_ * x + b_;
      for (auto const &t : terms_)
        y += t.coef * monomial(t.exps, x);
      return y;
    }
    case Kind::composite:
    {
      Vec y = x;
      for (auto const &p : parts_)
        y = p.eval(y);
      return y;
    }
    }
    return x;
  }

  Mat jacobian(Vec const &x) const
  {
    switch (kind_)
    {
    case Kind::affine:
      return A_;
    case Kind::perturbed:
    {
      Mat J = A_;
      for (auto const &t : terms_)
        J += t.coef * monomial_gradient(t.exps, x).transpose();
      return J;
    }
    case Kind::composite:
    {
      Mat J = Mat::Identity(dim_, dim_);
      Vec y = x;
      for (auto const &p : parts_)
      {
        J = p.jacobian(y) * J;
        y = p.eval(y);
      }
      return J;
    }
    }
    return A_;
  }

  double monomial(std::array<int, 3> const &e, Vec const &x) const
  {
    double m = 1.0;
    for (int i = 0; i < dim_; ++i)
      m *= std::pow(x(i), e[i]);
    return m;
  }

  Vec monomial_gradient(std::array<int, 3> const &e, Vec const &x) const
  {
    Vec g(dim_);
    for (int i = 0; i < dim_; ++i)
    {
      if (e[i] == 0)
      {
        g(i) = 0.0;
        continue;
      }
      double d = e[i] * std::pow(x(i), e[i] - 1);
      for (int j = 0; j < dim_; ++j)
        if (j != i)
          d *= std::pow(x(j), e[j]);
      g(i) = d;
    }
    return g;
  }

private:
  ContractionMap() = default;

  void certify()
  {
    dim_ = static_cast<int>(b_.size());
    check_dim(dim_);
    if (A_.rows() != dim_ || A_.cols() != dim_)
      throw representation_mismatch("map matrix must be n x n with n = len(b)");
    if (!A_.allFinite() || !b_.allFinite())
      throw domain_error("map coefficients must be finite");

    auto const sv = singular_values(A_);
    double const smax_a = sv(0);
    double const smin_a = sv(dim_ - 1);
    double grad = 0.0;  // sum |c| |e|_2 bounds the perturbation Jacobian
    double hess = 0.0;  // sum |c| ||second-derivative bounds||_F
    for (auto &t : terms_)
    {
      if (t.coef.size() != dim_)
        throw representation_mismatch("perturbation coefficient has wrong size");
      double e2 = 0.0, h2 = 0.0;
      for (int i = 0; i < dim_; ++i)
      {
        if (t.exps[i] < 0)
          throw domain_error("perturbation exponents must be nonnegative");
        e2 += double(t.exps[i]) * t.exps[i];
        for (int j = 0; j < dim_; ++j)
        {
          double const hij = double(t.exps[i]) * (t.exps[j] - (i == j ? 1 : 0));
          h2 += hij * hij;
        }
      }
      for (int i = dim_; i < 3; ++i)
        if (t.exps[i] != 0)
          throw representation_mismatch("exponent given for a missing coordinate");
      grad += t.coef.norm() * std::sqrt(e2);
      hess += t.coef.norm() * std::sqrt(h2);
    }
    lip_ = smax_a + grad;
    smin_ = smin_a - grad;
    holder_ = hess;
    if (!(lip_ < 1.0))
      throw domain_error("map is not a contraction: Lipschitz bound " +
                         std::to_string(lip_) + " >= 1");
    if (std::abs(A_.determinant()) == 0.0 || !(smin_ > 0.0))
      throw singularity_error("map Jacobian cannot be certified invertible on "
                              "the unit ball");
    check_containment();
  }

  // Images of the ball must stay in the closed ball; maps touching the
  // boundary (tiling systems) are admitted within touch_tol.
  void check_containment() const
  {
    double worst = 0.0;
    if (kind_ == Kind::affine)
    {
      if (b_.norm() + sigma_max(A_) <= 1.0 + touch_tol)
        return;
      for (auto const &v : sphere_net(dim_, 0.01))
        worst = std::max(worst, eval(v).norm());
    }
    else
    {
      for (auto const &v : ball_net(dim_, dim_ == 1 ? 1e-3 : 0.02))
        worst = std::max(worst, eval(v).norm());
    }
    if (worst > 1.0 + touch_tol)
      throw domain_error("map sends the unit ball outside itself (max |f(x)| = " +
                         std::to_string(worst) + ")");
  }

  Kind kind_ = Kind::affine;
  int dim_ = 1;
  Mat A_;
  Vec b_;
  std::vector<PolyTerm> terms_;
  std::vector<ContractionMap> parts_;
  double lip_ = 0.0;
  double smin_ = 0.0;
  double holder_ = 0.0;
};

class System
{
public:
  System() = default;

  System(int dim, std::vector<ContractionMap> maps)
      : dim_(dim), maps_(std::make_shared<std::vector<ContractionMap> const>(std::move(maps)))
  {
    check_dim(dim_);
    if (maps_->empty())
      throw domain_error("system needs at least one map");
    for (auto const &f : *maps_)
      if (f.dim() != dim_)
        throw representation_mismatch("all maps of a system must share dimension");
  }

  int dim() const { return dim_; }
  std::size_t size() const { return maps_->size(); }
  ContractionMap const &operator[](std::size_t j) const { return (*maps_)[j]; }
  std::vector<ContractionMap> const &maps() const { return *maps_; }
  std::shared_ptr<std::vector<ContractionMap> const> const &shared_maps() const
  {
    return maps_;
  }

  double lipschitz() const
  {
    double l = 0.0;
    for (auto const &f : *maps_)
      l = std::max(l, f.lipschitz());
    return l;
  }

  double sigma_min_bound() const
  {
    double s = std::numeric_limits<double>::infinity();
    for (auto const &f : *maps_)
      s = std::min(s, f.sigma_min_bound());
    return s;
  }

  double holder_alpha() const { return 1.0; }

  double holder_const() const
  {
    double h = 0.0;
    for (auto const &f : *maps_)
      h = std::max(h, f.holder_const());
    return h;
  }

  double inverse_norm_bound() const { return 1.0 / sigma_min_bound(); }

  bool is_affine() const
  {
    return std::all_of(maps_->begin(), maps_->end(),
                       [](auto const &f) { return f.is_affine(); });
  }

private:
  int dim_ = 1;
  std::shared_ptr<std::vector<ContractionMap> const> maps_ =
      std::make_shared<std::vector<ContractionMap> const>();
};

/// indices[0] is applied first: the word j1..jm denotes f_jm o ... o f_j1.
struct Word
{
  std::vector<int> indices;

  std::size_t length() const { return indices.size(); }
  bool empty() const { return indices.empty(); }

  auto operator<=>(Word const &) const = default;
  bool operator==(Word const &) const = default;
};

inline void check_word(System const &F, Word const &w)
{
  for (int j : w.indices)
    if (j < 0 || static_cast<std::size_t>(j) >= F.size())
      throw domain_error("word index " + std::to_string(j) + " out of range");
}

/// A composition f_w as a value handle over the system's maps.
class ComposedMap
{
public:
  ComposedMap(System const &F, Word w) : maps_(F.shared_maps()), dim_(F.dim()), word_(std::move(w))
  {
    check_word(F, word_);
    affine_ = true;
    for (int j : word_.indices)
      affine_ = affine_ && (*maps_)[j].is_affine();
    M_ = Mat::Identity(dim_, dim_);
    t_ = Vec::Zero(dim_);
    lip_ = 1.0;
    smin_ = 1.0;
    holder_ = 0.0;
    for (int j : word_.indices)
    {
      auto const &f = (*maps_)[j];
      if (affine_)
      {
        M_ = f.matrix() * M_;
        t_ = f.matrix() * t_ + f.translation();
      }
      holder_ = f.holder_const() * lip_ * lip_ + f.lipschitz() * holder_;
      lip_ *= f.lipschitz();
      smin_ *= f.sigma_min_bound();
    }
    if (affine_)
    {
      auto const sv = singular_values(M_);
      lip_ = sv(0);
      smin_ = sv(dim_ - 1);
    }
  }

  Word const &word() const { return word_; }
  int dim() const { return dim_; }
  bool is_affine() const { return affine_; }

  /// Exact product matrix A_jm ... A_j1 (affine words only).
  Mat const &matrix() const
  {
    require_affine();
    return M_;
  }
  Vec const &translation() const
  {
    require_affine();
    return t_;
  }

  Vec eval(Vec const &x) const
  {
    if (affine_)
      return M_ * x + t_;
    Vec y = x;
    for (int j : word_.indices)
      y = (*maps_)[j].eval(y);
    return y;
  }

  Mat jacobian(Vec const &x) const
  {
    if (affine_)
      return M_;
    Mat J = Mat::Identity(dim_, dim_);
    Vec y = x;
    for (int j : word_.indices)
    {
      J = (*maps_)[j].jacobian(y) * J;
      y = (*maps_)[j].eval(y);
    }
    return J;
  }

  /// x, f_j1(x), f_j2 f_j1(x), ..., f_w(x).
  std::vector<Vec> orbit(Vec const &x) const
  {
    std::vector<Vec> out{x};
    for (int j : word_.indices)
      out.push_back((*maps_)[j].eval(out.back()));
    return out;
  }

  /// Upper bound on ||Df_w|| (exact for affine words).
  double lipschitz() const { return lip_; }
  /// Lower bound on sigma_min(Df_w) (exact for affine words).
  double sigma_min_bound() const { return smin_; }
  double holder_const() const { return holder_; }

  ContractionMap to_map() const
  {
    if (affine_)
      return ContractionMap::affine(M_, t_);
    std::vector<ContractionMap> parts;
    for (int j : word_.indices)
      parts.push_back((*maps_)[j]);
    return ContractionMap::composite(std::move(parts));
  }

private:
  void require_affine() const
  {
    if (!affine_)
      throw representation_mismatch("product matrix requested for a non-affine word");
  }

  std::shared_ptr<std::vector<ContractionMap> const> maps_;
  int dim_;
  Word word_;
  bool affine_ = true;
  Mat M_;
  Vec t_;
  double lip_ = 1.0, smin_ = 1.0, holder_ = 0.0;
};

inline ComposedMap compose(System const &F, Word w) { return ComposedMap(F, std::move(w)); }

namespace detail
{

/// Axis-aligned box enclosing f(cell) for a cell with given center and width h.
inline std::pair<Vec, Vec> image_box(ContractionMap const &f, Vec const &center, double h)
{
  int const n = f.dim();
  Vec lo(n), hi(n);
  Vec const c = f.eval(center);
  if (f.is_affine())
  {
    Vec const ext = f.matrix().cwiseAbs() * Vec::Constant(n, 0.5 * h);
    lo = c - ext;
    hi = c + ext;
  }
  else
  {
    double const r = f.lipschitz() * 0.5 * h * std::sqrt(double(n));
    lo = c.array() - r;
    hi = c.array() + r;
  }
  return {lo, hi};
}

} // namespace detail

/// Union of images, conservatively rasterized: every cell meeting the image
/// box of an occupied cell is marked, so the result contains F(A).
inline GridSet hutchinson(System const &F, GridSet const &A)
{
  if (A.empty())
    throw empty_set_error("Hutchinson operator applied to an empty set");
  if (A.dim() != F.dim())
    throw representation_mismatch("set and system dimensions differ");
  double const h = A.cell_size();
  std::size_t const chunks = std::min<std::size_t>(64, A.size());
  std::vector<CellMarks> partial;
  int const workers = std::min<int>(thread_count(), static_cast<int>(chunks));
  if (workers <= 1)
  {
    CellMarks marks(A);
    for (auto c : A.cells())
    {
      Vec const x = A.center(c);
      for (auto const &f : F.maps())
      {
        auto [lo, hi] = detail::image_box(f, x, h);
        marks.mark_box(lo, hi);
      }
    }
    return marks.to_grid();
  }
  std::vector<std::vector<GridSet::Index>> found(chunks);
  parallel_chunks(A.size(), chunks, [&](std::size_t k, std::size_t b, std::size_t e) {
    CellMarks local(A);
    for (std::size_t i = b; i < e; ++i)
    {
      Vec const x = A.center(A.cells()[i]);
      for (auto const &f : F.maps())
      {
        auto [lo, hi] = detail::image_box(f, x, h);
        local.mark_box(lo, hi);
      }
    }
    found[k] = local.to_grid().cells();
  });
  std::vector<GridSet::Index> all;
  for (auto &v : found)
    all.insert(all.end(), v.begin(), v.end());
  return GridSet(A.dim(), A.level(), std::move(all));
}

/// Exact images of the samples; the net resolution scales by L.
inline PointCloud hutchinson(System const &F, PointCloud const &A)
{
  if (A.empty())
    throw empty_set_error("Hutchinson operator applied to an empty set");
  if (A.dim != F.dim())
    throw representation_mismatch("set and system dimensions differ");
  std::vector<Vec> out;
  out.reserve(A.size() * F.size());
  for (auto const &f : F.maps())
    for (auto const &p : A.points)
    {
      Vec y = f.eval(p);
      double const r = y.norm();
      if (r > 1.0)
        y /= r;  // touch_tol overshoot only
      out.push_back(y);
    }
  return PointCloud(A.dim, std::move(out),
                    std::max(F.lipschitz() * A.resolution, 1e-300));
}

inline SetRep hutchinson(System const &F, SetRep const &A)
{
  return std::visit([&](auto const &x) -> SetRep { return hutchinson(F, x); }, A);
}

struct AttractorResult
{
  GridSet grid;
  int steps = 0;           // iterations performed
  int planned_steps = 0;   // a-priori iteration count for tol
  bool stationary = false; // reached a grid fixed point before planned_steps
  double tol = 0.0;
  double hd_bound = 0.0;   // bound on Hd(union of cells, attractor)
};

inline int planned_iterations(double L, double tol, double diam = 2.0)
{
  if (L <= 0.0)
    return 1;
  double const n = std::log(tol * (1.0 - L) / diam) / std::log(L);
  return std::max(1, static_cast<int>(std::ceil(n - 1e-12)));
}

/// Iterates the grid Hutchinson operator from the whole ball. The result is a
/// superset of the attractor within hd_bound = tol + (1+L)·diag/(1-L).
inline AttractorResult attractor(System const &F, double tol, int level)
{
  if (!(tol > 0.0))
    throw domain_error("attractor tolerance must be positive");
  GridSet::validate_shape(F.dim(), level);
  GridSet g = GridSet::full(F.dim(), level);
  if (tol < g.diagonal())
    throw resolution_error("tolerance " + std::to_string(tol) +
                               " is below the grid resolution at level " +
                               std::to_string(level),
                           g.diagonal());
  double const L = F.lipschitz();
  AttractorResult r;
  r.tol = tol;
  r.planned_steps = planned_iterations(L, tol);
  for (r.steps = 0; r.steps < r.planned_steps;)
  {
    GridSet next = hutchinson(F, g);
    ++r.steps;
    if (next == g)
    {
      r.stationary = true;
      break;
    }
    g = std::move(next);
  }
  r.hd_bound = tol + (1.0 + L) * g.diagonal() / (1.0 - L);
  r.grid = std::move(g);
  return r;
}

/// max over samples of Hd(F(x), G(x)); uncertainty (L_F + L_G + 1)·eps covers
/// the points between samples.
inline Distance d0_distance(System const &F, System const &G, PointCloud const &sample)
{
  if (F.dim() != G.dim() || sample.dim != F.dim())
    throw representation_mismatch("d0 requires matching dimensions");
  if (sample.empty())
    throw domain_error("d0 needs a nonempty sample of the ball");
  double best = 0.0;
  std::vector<Vec> fx(F.size()), gx(G.size());
  for (auto const &x : sample.points)
  {
    for (std::size_t j = 0; j < F.size(); ++j)
      fx[j] = F[j].eval(x);
    for (std::size_t j = 0; j < G.size(); ++j)
      gx[j] = G[j].eval(x);
    best = std::max({best, detail::directed_distance(fx, gx),
                     detail::directed_distance(gx, fx)});
  }
  return {best, (F.lipschitz() + G.lipschitz() + 1.0) * sample.resolution};
}

/// eps-net of the ball as a PointCloud.
inline PointCloud ball_sample(int dim, double eps)
{
  return PointCloud(dim, ball_net(dim, eps), eps);
}

} // namespace lsf
