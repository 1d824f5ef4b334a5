#pragma once

// JSON / CSV / PGM serialization and run manifests.

#include "lsf/probes.hpp"

#include <json.hpp>

#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace lsf
{

using json = nlohmann::ordered_json;

inline json to_json(Vec const &v)
{
  json a = json::array();
  for (int i = 0; i < v.size(); ++i)
    a.push_back(v(i));
  return a;
}

inline json to_json(Mat const &m)
{
  json a = json::array();
  for (int i = 0; i < m.rows(); ++i)
  {
    json row = json::array();
    for (int j = 0; j < m.cols(); ++j)
      row.push_back(m(i, j));
    a.push_back(row);
  }
  return a;
}

inline json to_json(Word const &w) { return json(w.indices); }

inline json to_json(GridSet const &g)
{
  json cells = json::array();
  for (auto c : g.cells())
  {
    auto const k = g.coords(c);
    json t = json::array();
    for (int a = 0; a < g.dim(); ++a)
      t.push_back(k[a]);
    cells.push_back(t);
  }
  return {{"dim", g.dim()}, {"level", g.level()}, {"cells", cells}};
}

inline GridSet grid_from_json(json const &j)
{
  int const dim = j.at("dim").get<int>();
  int const level = j.at("level").get<int>();
  GridSet shape(dim, level, {});
  std::vector<GridSet::Index> cells;
  for (auto const &t : j.at("cells"))
  {
    if (t.size() != static_cast<std::size_t>(dim))
      throw representation_mismatch("cell tuple length does not match dim");
    Coords k{0, 0, 0};
    for (int a = 0; a < dim; ++a)
      k[a] = t[a].get<std::int64_t>();
    if (!shape.in_range(k))
      throw domain_error("cell tuple out of range");
    cells.push_back(shape.index(k));
  }
  return GridSet(dim, level, std::move(cells));
}

inline json to_json(PointCloud const &p)
{
  json pts = json::array();
  for (auto const &x : p.points)
    pts.push_back(to_json(x));
  return {{"dim", p.dim}, {"resolution", p.resolution}, {"points", pts}};
}

inline PointCloud cloud_from_json(json const &j)
{
  int const dim = j.at("dim").get<int>();
  std::vector<Vec> pts;
  for (auto const &x : j.at("points"))
  {
    Vec v(static_cast<Eigen::Index>(x.size()));
    for (std::size_t i = 0; i < x.size(); ++i)
      v(i) = x[i].get<double>();
    pts.push_back(v);
  }
  return PointCloud(dim, std::move(pts), j.at("resolution").get<double>());
}

namespace detail
{

inline Vec vec_from_json(json const &j, int dim, char const *what)
{
  Vec v(dim);
  if (j.is_number() && dim == 1)
  {
    v(0) = j.get<double>();
    return v;
  }
  if (!j.is_array() || j.size() != static_cast<std::size_t>(dim))
    throw representation_mismatch(std::string(what) + " must have " + std::to_string(dim) +
                                  " entries");
  for (int i = 0; i < dim; ++i)
    v(i) = j[i].get<double>();
  return v;
}

inline Mat mat_from_json(json const &j, int dim)
{
  Mat m(dim, dim);
  if (j.is_number() && dim == 1)
  {
    m(0, 0) = j.get<double>();
    return m;
  }
  if (!j.is_array() || j.size() != static_cast<std::size_t>(dim))
    throw representation_mismatch("A must be an n x n matrix");
  for (int r = 0; r < dim; ++r)
  {
    auto const &row = j[r];
    if (row.is_number() && dim == 1)
    {
      m(0, 0) = row.get<double>();
      continue;
    }
    if (!row.is_array() || row.size() != static_cast<std::size_t>(dim))
      throw representation_mismatch("A must be an n x n matrix");
    for (int c = 0; c < dim; ++c)
      m(r, c) = row[c].get<double>();
  }
  return m;
}

} // namespace detail

/// {dim, maps:[{kind:"affine", A, b} | {kind:"perturbed", A, b, poly:{terms:[{exps, coef}]}}]}
inline System system_from_json(json const &j)
{
  int const dim = j.at("dim").get<int>();
  check_dim(dim);
  std::vector<ContractionMap> maps;
  for (auto const &m : j.at("maps"))
  {
    std::string const kind = m.value("kind", "affine");
    Mat const A = detail::mat_from_json(m.at("A"), dim);
    Vec const b = detail::vec_from_json(m.at("b"), dim, "b");
    if (kind == "affine")
    {
      maps.push_back(ContractionMap::affine(A, b));
      continue;
    }
    if (kind != "perturbed")
      throw domain_error("unknown map kind '" + kind + "'");
    std::vector<PolyTerm> terms;
    for (auto const &t : m.at("poly").at("terms"))
    {
      PolyTerm pt;
      auto const &e = t.at("exps");
      if (e.size() != static_cast<std::size_t>(dim))
        throw representation_mismatch("exps must have one entry per coordinate");
      for (int i = 0; i < dim; ++i)
        pt.exps[i] = e[i].get<int>();
      pt.coef = detail::vec_from_json(t.at("coef"), dim, "coef");
      terms.push_back(pt);
    }
    maps.push_back(ContractionMap::perturbed(A, b, std::move(terms)));
  }
  return System(dim, std::move(maps));
}

inline System load_system(std::string const &path)
{
  std::ifstream in(path);
  if (!in)
    throw domain_error("cannot open system spec '" + path + "'");
  return system_from_json(json::parse(in));
}

inline json to_json(ContractionMap const &f)
{
  json j;
  if (f.kind() == ContractionMap::Kind::composite)
    throw representation_mismatch("composite maps have no spec form");
  j["kind"] = f.is_affine() ? "affine" : "perturbed";
  j["A"] = to_json(f.matrix());
  j["b"] = to_json(f.translation());
  if (!f.is_affine())
  {
    json terms = json::array();
    for (auto const &t : f.terms())
    {
      json e = json::array();
      for (int i = 0; i < f.dim(); ++i)
        e.push_back(t.exps[i]);
      terms.push_back({{"exps", e}, {"coef", to_json(t.coef)}});
    }
    j["poly"] = {{"terms", terms}};
  }
  return j;
}

inline json to_json(System const &F)
{
  json maps = json::array();
  for (auto const &f : F.maps())
    maps.push_back(to_json(f));
  return {{"dim", F.dim()}, {"maps", maps}};
}

/// Constants derived at load time.
inline json system_summary(System const &F, double slack = 1.01)
{
  auto const c = contraction_constants(F, slack);
  return {{"maps", F.size()},
          {"L", F.lipschitz()},
          {"k", c.k},
          {"K", c.K},
          {"slack", slack},
          {"affine", F.is_affine()},
          {"H_alpha", F.holder_const()},
          {"alpha", F.holder_alpha()}};
}

inline json to_json(DistortionReport const &r, ContractionConstants const &c)
{
  return {{"n", r.n_max},
          {"Q", r.Q},
          {"D", r.D},
          {"exhaustive", {{"Q", r.exhaustive_Q}, {"D", r.exhaustive_D}}},
          {"constants",
           {{"K", c.K}, {"k", c.k}, {"C", r.C}, {"H_alpha", r.H_alpha}, {"alpha", r.alpha}}},
          {"sampling",
           {{"seed", r.sampling.seed},
            {"net_eps", r.sampling.net_eps},
            {"words", r.words},
            {"net_slack", r.net_slack}}}};
}

inline json to_json(MeasureBracket const &m)
{
  return {{"inner", m.inner}, {"outer", m.outer}, {"level", m.level}};
}

inline json to_json(DimensionBracket const &b)
{
  return {{"n", b.n},
          {"N_n", b.N},
          {"lower", b.lower},
          {"upper", b.upper},
          {"ingredients", {{"k", b.k}, {"K", b.K}, {"Q", b.Q}, {"D", b.D}}}};
}

inline json to_json(DynamicCover const &cov, DisjointSubsystem const *sel = nullptr)
{
  json words = json::array();
  for (auto const &w : cov.words)
    words.push_back({{"indices", to_json(w.word)}, {"lo", w.lo}, {"hi", w.hi}});
  json j = {{"n", cov.n},
            {"k", cov.constants.k},
            {"K", cov.constants.K},
            {"Q", cov.Q},
            {"D", cov.D},
            {"window", {cov.window_lo, cov.window_hi}},
            {"lower_violations", cov.lower_violations.size()},
            {"words", words}};
  if (sel)
  {
    json s = json::array();
    for (auto i : sel->selected)
      s.push_back(to_json(cov.words[i].word));
    j["disjoint"] = {{"selected", s},
                     {"N_n", sel->N},
                     {"ambiguous", sel->ambiguous.size()},
                     {"maximal", sel->maximal},
                     {"reading", sel->reading == Reading::open ? "open" : "closed"}};
  }
  return j;
}

inline json to_json(CapacityEstimate const &e)
{
  return {{"base", e.lattice.base},
          {"levels", e.levels},
          {"scales", e.scales},
          {"counts", e.counts},
          {"slope", e.slope},
          {"residual", e.residual},
          {"window", {e.window_first, e.window_last}},
          {"flat", e.flat}};
}

inline json to_json(OscResult const &r)
{
  json j = {{"certified", r.certified},
            {"closure_disjoint", r.closure_disjoint},
            {"invariant", r.invariant},
            {"min_margin", r.min_margin},
            {"margins", r.margins}};
  if (r.witness_i >= 0)
    j["witness"] = {r.witness_i, r.witness_j};
  else
    j["witness"] = nullptr;
  return j;
}

/// Fixed formatting for CSV numbers: shortest round-trip digits.
inline std::string fmt(double x)
{
  std::ostringstream s;
  s << std::setprecision(17) << x;
  double back = 0.0;
  for (int p = 6; p <= 17; ++p)
  {
    std::ostringstream t;
    t << std::setprecision(p) << x;
    std::istringstream(t.str()) >> back;
    if (back == x)
      return t.str();
  }
  return s.str();
}

/// CSV with `# ` header comments describing each column.
inline void write_csv(std::ostream &out, std::vector<std::string> const &comments,
                      std::vector<std::string> const &columns,
                      std::vector<std::vector<std::string>> const &rows)
{
  for (auto const &c : comments)
    out << "# " << c << '\n';
  for (std::size_t i = 0; i < columns.size(); ++i)
    out << (i ? "," : "") << columns[i];
  out << '\n';
  for (auto const &r : rows)
  {
    for (std::size_t i = 0; i < r.size(); ++i)
      out << (i ? "," : "") << r[i];
    out << '\n';
  }
}

inline void write_counts_csv(std::ostream &out, CapacityEstimate const &e, std::string const &frame)
{
  std::vector<std::vector<std::string>> rows;
  for (std::size_t i = 0; i < e.counts.size(); ++i)
    rows.push_back({std::to_string(e.levels[i]), fmt(e.scales[i]), std::to_string(e.counts[i])});
  write_csv(out,
            {"level: box refinement index j (dimensionless)",
             "scale: box side delta_j, " + frame,
             "count: boxes meeting the set (dimensionless)",
             "lattice base " + std::to_string(e.lattice.base)},
            {"level", "scale", "count"}, rows);
}

/// Binary P5 raster of a 2-D grid: one pixel per cell, row 0 = top (largest
/// second coordinate), occupied = 0, empty = 255.
inline void write_pgm(std::ostream &out, GridSet const &g)
{
  if (g.dim() != 2)
    throw representation_mismatch("PGM export needs a 2-D grid");
  auto const w = g.width();
  std::vector<unsigned char> px(static_cast<std::size_t>(w * w), 255);
  for (auto c : g.cells())
  {
    auto const k = g.coords(c);
    px[static_cast<std::size_t>((w - 1 - k[1]) * w + k[0])] = 0;
  }
  out << "P5\n" << w << ' ' << w << "\n255\n";
  out.write(reinterpret_cast<char const *>(px.data()), static_cast<std::streamsize>(px.size()));
}

/// 1-D grids render as a single-row raster.
inline void write_pgm_1d(std::ostream &out, GridSet const &g)
{
  auto const w = g.width();
  std::vector<unsigned char> px(static_cast<std::size_t>(w), 255);
  for (auto c : g.cells())
    px[c] = 0;
  out << "P5\n" << w << " 1\n255\n";
  out.write(reinterpret_cast<char const *>(px.data()), static_cast<std::streamsize>(px.size()));
}

inline json manifest(std::string const &command, json params)
{
  return {{"tool", "lsf"}, {"version", version}, {"command", command}, {"params", std::move(params)}};
}

} // namespace lsf
