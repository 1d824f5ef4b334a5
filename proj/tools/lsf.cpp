// lsf: command-line front end for attractors, dimension brackets, distortion
// reports, parameter sweeps and the property suites.
//
// Exit codes: 0 pass, 1 assertion failure, 2 usage or precondition error.

#include "lsf/lsf.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace
{

using lsf::json;

struct Options
{
  std::string family;
  std::string spec;
  double t = 0.5;
  double lambda = 0.2;
  int level = -1;
  double tol = -1.0;
  std::string render;
  std::string out;
  std::string csv;
  int n = 7;
  std::string levels;
  std::string mode = "full";
  std::string lattice = "dyadic";
  double slack = 1.01;
  std::uint64_t seed = 1;
  int threads = 0;
  std::string suite;
  bool all = false;
  std::string kind = "measure";
  double t_star = 0.5;
  double radius = 0.05;
  int steps = 21;
  double tolerance = -1.0;
  double net_eps = 0.05;
};

struct AssertionFailure
{
  json report;
};

lsf::FamilySpec family_of(Options const &o)
{
  if (!o.spec.empty())
    return lsf::custom_family(lsf::load_system(o.spec));
  std::string const name = o.family.empty() ? "three_branch" : o.family;
  if (name == "three_branch")
    return lsf::three_branch_family(o.t);
  if (name == "g_lambda")
    return lsf::g_lambda_family(o.lambda);
  if (name == "cantor")
    return lsf::cantor_family();
  if (name == "full_interval")
    return lsf::full_interval_family();
  throw lsf::domain_error("unknown family '" + name + "'");
}

json family_params(Options const &o, lsf::FamilySpec const &fam)
{
  json j = {{"family", fam.name}};
  if (!o.spec.empty())
    j["spec"] = o.spec;
  for (auto const &[k, v] : fam.params)
    j[k] = v;
  return j;
}

int default_level(int dim)
{
  return dim == 1 ? 12 : (dim == 2 ? 8 : 5);
}

// Normalized [-1,1] frame for custom systems, natural [0,1] for families.
std::string frame_note(lsf::FamilySpec const &fam)
{
  return fam.name == "custom" ? "normalized frame [-1,1]^n" : "natural frame [0,1]";
}

std::pair<int, int> parse_levels(std::string const &s, int fallback_hi)
{
  if (s.empty())
    return {2, fallback_hi};
  auto const dots = s.find("..");
  if (dots == std::string::npos)
    throw lsf::domain_error("--levels expects a..b");
  return {std::stoi(s.substr(0, dots)), std::stoi(s.substr(dots + 2))};
}

lsf::BoxLattice parse_lattice(std::string const &s)
{
  if (s == "dyadic")
    return lsf::BoxLattice::dyadic();
  if (s == "triadic")
    return lsf::BoxLattice::triadic();
  if (s.rfind("adic:", 0) == 0)
    return lsf::BoxLattice::adic(std::stoi(s.substr(5)));
  throw lsf::domain_error("unknown lattice '" + s + "' (dyadic, triadic, adic:<base>)");
}

void emit(Options const &o, json const &result)
{
  std::cout << result.dump(2) << '\n';
  if (!o.out.empty())
  {
    std::ofstream f(o.out);
    if (!f)
      throw lsf::domain_error("cannot write '" + o.out + "'");
    f << result.dump(2) << '\n';
  }
}

std::ofstream open_out(std::string const &path)
{
  std::ofstream f(path, std::ios::binary);
  if (!f)
    throw lsf::domain_error("cannot write '" + path + "'");
  return f;
}

void cmd_attractor(Options const &o)
{
  auto const fam = family_of(o);
  auto const F = fam.system();
  int const level = o.level >= 0 ? o.level : default_level(F.dim());
  lsf::GridSet const shape(F.dim(), level, {});
  double const tol = o.tol > 0.0 ? o.tol : 2.0 * shape.diagonal();
  auto params = family_params(o, fam);
  params["level"] = level;
  params["tol"] = tol;
  params["threads"] = lsf::thread_count();

  auto const att = lsf::attractor(F, tol, level);
  json res;
  res["manifest"] = lsf::manifest("attractor", params);
  res["system"] = lsf::system_summary(F);
  res["attractor"] = {{"cells", att.grid.size()},
                      {"steps", att.steps},
                      {"planned_steps", att.planned_steps},
                      {"stationary", att.stationary},
                      {"hd_bound", att.hd_bound}};
  try
  {
    auto const mb = lsf::measure_bracket(att.grid, F);
    res["measure"] = lsf::to_json(mb);
    res["measure"]["frame"] = "normalized";
    if (fam.name != "custom")
    {
      auto const fr = fam.frame();
      res["measure_natural"] = {{"inner", fr.measure_to_natural(mb.inner)},
                                {"outer", fr.measure_to_natural(mb.outer)},
                                {"frame", "natural [0,1]"}};
    }
  }
  catch (lsf::precondition_error const &e)
  {
    res["measure"] = {{"skipped", e.what()}};
  }
  if (!o.render.empty())
  {
    auto f = open_out(o.render);
    if (F.dim() == 1)
      lsf::write_pgm_1d(f, att.grid);
    else
      lsf::write_pgm(f, att.grid);
    res["render"] = o.render;
  }
  std::cout << res.dump(2) << '\n';
  if (!o.out.empty())
  {
    res["grid"] = lsf::to_json(att.grid);
    open_out(o.out) << res.dump(2) << '\n';
  }
}

void cmd_dimension(Options const &o)
{
  if (o.mode != "full" && o.mode != "capacity-only" && o.mode != "bracket-only")
    throw lsf::domain_error("--mode must be full, capacity-only or bracket-only");
  auto const fam = family_of(o);
  auto const F = fam.system();
  int const level = o.level >= 0 ? o.level : default_level(F.dim());
  auto const [j0, j1] = parse_levels(o.levels, std::max(3, level - 2));
  auto params = family_params(o, fam);
  params["mode"] = o.mode;
  params["level"] = level;
  params["levels"] = {j0, j1};
  params["lattice"] = o.lattice;
  params["n"] = o.n;
  params["slack"] = o.slack;
  params["seed"] = o.seed;
  params["threads"] = lsf::thread_count();

  json res;
  res["manifest"] = lsf::manifest("dimension", params);
  res["system"] = lsf::system_summary(F, o.slack);

  if (o.mode != "bracket-only")
  {
    lsf::GridSet const shape(F.dim(), level, {});
    auto const att = lsf::attractor(F, o.tol > 0.0 ? o.tol : 2.0 * shape.diagonal(), level);
    auto const est = lsf::limit_capacity(att.grid, j0, j1, parse_lattice(o.lattice));
    res["capacity"] = lsf::to_json(est);
    if (!o.csv.empty())
    {
      auto f = open_out(o.csv);
      f << "# manifest: " << res["manifest"].dump() << '\n';
      lsf::write_counts_csv(f, est, "normalized frame [-1,1]^n (natural = scale/2)");
    }
  }
  if (o.mode != "capacity-only")
  {
    lsf::Sampling s;
    s.seed = o.seed;
    auto const h = lsf::hdim_bracket(F, o.n, o.slack, s);
    res["bracket"] = lsf::to_json(h.bracket);
    res["cover"] = {{"words", h.cover.words.size()},
                    {"max_length", h.cover.max_length()},
                    {"window_holds", h.cover.window_holds()},
                    {"ambiguous", h.disjoint.ambiguous.size()},
                    {"reading", "open"}};
  }
  // Similarity systems: Moran value and an OSC check on the whole cube.
  bool similar = F.is_affine();
  std::vector<double> ratios;
  for (auto const &f : F.maps())
  {
    auto const sv = lsf::singular_values(f.matrix());
    similar = similar && sv.maxCoeff() - sv.minCoeff() <= 1e-12;
    ratios.push_back(sv.maxCoeff());
  }
  if (similar && o.mode != "bracket-only")
  {
    auto const osc = lsf::check_osc(F, lsf::Box{lsf::Vec::Constant(F.dim(), -1.0),
                                                lsf::Vec::Constant(F.dim(), 1.0)});
    res["similarity"] = {{"moran", lsf::moran_dimension(ratios)}, {"osc", lsf::to_json(osc)}};
  }
  emit(o, res);
}

void cmd_distortion(Options const &o)
{
  auto const fam = family_of(o);
  auto const F = fam.system();
  auto params = family_params(o, fam);
  params["n"] = o.n;
  params["seed"] = o.seed;
  params["net_eps"] = o.net_eps;
  params["slack"] = o.slack;
  params["threads"] = lsf::thread_count();
  lsf::Sampling s;
  s.seed = o.seed;
  s.net_eps = o.net_eps;
  auto const rep = lsf::distortion_report(F, o.n, s);
  json res;
  res["manifest"] = lsf::manifest("distortion", params);
  res["system"] = lsf::system_summary(F, o.slack);
  res["report"] = lsf::to_json(rep, lsf::contraction_constants(F, o.slack));
  if (o.n >= 2)
  {
    auto const d = lsf::semi_conformality_diagnostic(F, o.n, s);
    res["conformality"] = {{"verdict", lsf::to_string(d.verdict)},
                           {"relative_slope", d.relative_slope},
                           {"Q_over_n", d.ratios}};
  }
  emit(o, res);
}

void cmd_sweep(Options const &o)
{
  auto const fam = family_of(o);
  auto params = family_params(o, fam);
  if (!fam.parameter().empty())
    params.erase(fam.parameter());
  params["kind"] = o.kind;
  params["t_star"] = o.t_star;
  params["radius"] = o.radius;
  params["steps"] = o.steps;
  params["threads"] = lsf::thread_count();

  json res;
  std::vector<std::string> comments, cols;
  std::vector<std::vector<std::string>> rows;
  bool pass = false;
  if (o.kind == "measure")
  {
    int const level = o.level >= 0 ? o.level : 12;
    params["level"] = level;
    res["manifest"] = lsf::manifest("sweep", params);
    auto const pr = lsf::measure_semicontinuity_probe(fam, o.t_star, o.radius, o.steps, level);
    pass = pr.pass;
    res["summary"] = {{"mu_star", pr.mu_star},
                      {"slack", pr.slack},
                      {"worst_excess", pr.worst_excess},
                      {"skipped", pr.skipped},
                      {"pass", pr.pass}};
    comments = {"t: family parameter",
                "d0: distance of F_t to F_t* (" + frame_note(fam) + ")",
                "mu_inner, mu_outer: Lebesgue measure bracket of the attractor (" +
                    frame_note(fam) + ")",
                "hd_to_star: Hausdorff distance to the t* attractor (" + frame_note(fam) + ")",
                "contraction_ok: attractor distance within d0/(1-L) plus grid slack"};
    cols = {"t", "d0", "mu_inner", "mu_outer", "hd_to_star", "contraction_ok"};
    for (auto const &r : pr.rows)
      rows.push_back({lsf::fmt(r.t), lsf::fmt(r.d0), lsf::fmt(r.mu_inner), lsf::fmt(r.mu_outer),
                      lsf::fmt(r.hd_to_star), r.contraction_ok ? "1" : "0"});
  }
  else if (o.kind == "dimension")
  {
    int const level = o.level >= 0 ? o.level : 12;
    double const slack = o.slack;
    params["level"] = level;
    params["n"] = o.n;
    params["slack"] = slack;
    params["tolerance"] = o.tolerance;
    res["manifest"] = lsf::manifest("sweep", params);
    auto const pr = lsf::dimension_semicontinuity_probe(fam, o.t_star, o.radius, o.steps, o.n,
                                                        level, o.tolerance, slack);
    pass = pr.pass;
    res["summary"] = {{"lower_star", pr.lower_star},
                      {"width_star", pr.width_star},
                      {"tolerance", pr.tolerance},
                      {"min_lower", pr.min_lower},
                      {"skipped", pr.skipped},
                      {"pass", pr.pass}};
    comments = {"t: family parameter",
                "lower, upper: Hausdorff dimension bracket from the dynamic cover (dimensionless)",
                "capacity: dyadic box-counting slope of the grid attractor (dimensionless)",
                "N: size of the disjoint cover subsystem"};
    cols = {"t", "lower", "upper", "capacity", "N"};
    for (auto const &r : pr.rows)
      rows.push_back({lsf::fmt(r.t), lsf::fmt(r.lower), lsf::fmt(r.upper), lsf::fmt(r.capacity),
                      std::to_string(r.N)});
  }
  else
    throw lsf::domain_error("--kind must be measure or dimension");

  json table = json::array();
  for (auto const &r : rows)
  {
    json row;
    for (std::size_t i = 0; i < cols.size(); ++i)
      row[cols[i]] = r[i];
    table.push_back(row);
  }
  res["rows"] = table;
  if (!o.csv.empty())
  {
    auto f = open_out(o.csv);
    comments.insert(comments.begin(), "manifest: " + res["manifest"].dump());
    lsf::write_csv(f, comments, cols, rows);
  }
  emit(o, res);
  if (!pass)
    throw AssertionFailure{res["summary"]};
}

void cmd_verify(Options const &o)
{
  std::vector<std::string> names;
  if (o.all)
    names = lsf::suite_names();
  else if (!o.suite.empty())
    names = {o.suite};
  else
    throw lsf::domain_error("verify needs --suite NAME or --all");
  json res;
  res["manifest"] = lsf::manifest("verify", {{"suites", names}, {"seed", o.seed},
                                             {"threads", lsf::thread_count()}});
  json suites = json::array();
  bool pass = true;
  for (auto const &name : names)
  {
    auto const r = lsf::run_suite(name, o.seed);
    pass = pass && r.pass();
    suites.push_back(lsf::to_json(r));
  }
  res["suites"] = suites;
  res["pass"] = pass;
  emit(o, res);
  if (!pass)
    throw AssertionFailure{res};
}

} // namespace

int main(int argc, char **argv)
{
  Options o;
  CLI::App app{"Locally scaling fractals: attractors, dimension and measure brackets"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(lsf::version));

  int env_threads = 0;
  if (char const *env = std::getenv("FRACTAL_THREADS"))
    env_threads = std::atoi(env);
  o.threads = env_threads;
  app.add_option("--threads", o.threads, "worker threads (default: FRACTAL_THREADS or 1)");

  auto add_system = [&](CLI::App *c) {
    c->add_option("--family", o.family, "three_branch | g_lambda | cantor | full_interval")
        ->check(CLI::IsMember({"three_branch", "g_lambda", "cantor", "full_interval"}));
    c->add_option("--t", o.t, "three_branch parameter t");
    c->add_option("--lambda", o.lambda, "g_lambda parameter");
    c->add_option("--spec", o.spec, "JSON system spec (normalized frame)")->check(CLI::ExistingFile);
    c->add_option("--out", o.out, "write the JSON result to this path");
  };

  auto *att = app.add_subcommand("attractor", "grid attractor, measure bracket, optional PGM");
  add_system(att);
  att->add_option("--level", o.level, "dyadic grid level");
  att->add_option("--tol", o.tol, "Hausdorff tolerance (default: two cell diagonals)");
  att->add_option("--render", o.render, "write a PGM raster");

  auto *dim = app.add_subcommand("dimension", "dimension bracket and box-counting capacity");
  add_system(dim);
  dim->add_option("--n", o.n, "cover level n");
  dim->add_option("--level", o.level, "dyadic grid level for box counting");
  dim->add_option("--tol", o.tol, "attractor tolerance");
  dim->add_option("--levels", o.levels, "box levels a..b");
  dim->add_option("--lattice", o.lattice, "dyadic | triadic | adic:<base>");
  dim->add_option("--mode", o.mode, "full | capacity-only | bracket-only");
  dim->add_option("--slack", o.slack, "contraction constant slack factor (>= 1)");
  dim->add_option("--seed", o.seed, "seed for sampled distortion sups");
  dim->add_option("--csv", o.csv, "write box counts as CSV");

  auto *dis = app.add_subcommand("distortion", "Q(n), D(n) report and conformality verdict");
  add_system(dis);
  dis->add_option("--n", o.n, "maximal word length");
  dis->add_option("--seed", o.seed, "sampling seed");
  dis->add_option("--net-eps", o.net_eps, "ball net spacing for sampled sups");
  dis->add_option("--slack", o.slack, "contraction constant slack factor");

  auto *sw = app.add_subcommand("sweep", "semi-continuity probe over a parameter grid");
  add_system(sw);
  sw->add_option("--kind", o.kind, "measure | dimension")
      ->check(CLI::IsMember({"measure", "dimension"}));
  sw->add_option("--t-star", o.t_star, "probe center");
  sw->add_option("--radius", o.radius, "probe radius");
  sw->add_option("--steps", o.steps, "grid points");
  sw->add_option("--level", o.level, "grid level");
  sw->add_option("--n", o.n, "cover level (dimension sweeps)");
  sw->add_option("--slack", o.slack, "contraction constant slack (dimension sweeps)");
  sw->add_option("--tolerance", o.tolerance, "allowed dip (default: bracket width at t*)");
  sw->add_option("--csv", o.csv, "write the table as CSV");

  auto *ver = app.add_subcommand("verify", "randomized property suites");
  ver->add_option("--suite", o.suite, "metric | contraction | distortion | cover | dimension | "
                                      "measure | families")
      ->check(CLI::IsMember(lsf::suite_names()));
  ver->add_flag("--all", o.all, "run every suite");
  ver->add_option("--seed", o.seed, "seed");
  ver->add_option("--out", o.out, "write the JSON result to this path");

  try
  {
    app.parse(argc, argv);
  }
  catch (CLI::CallForHelp const &e)
  {
    return app.exit(e);
  }
  catch (CLI::CallForVersion const &e)
  {
    return app.exit(e);
  }
  catch (CLI::ParseError const &e)
  {
    app.exit(e);
    return 2;
  }

  if (!o.family.empty() && !o.spec.empty())
  {
    std::cerr << "error: --family and --spec are exclusive\n";
    return 2;
  }
  lsf::set_thread_count(o.threads);

  try
  {
    if (*att)
      cmd_attractor(o);
    else if (*dim)
      cmd_dimension(o);
    else if (*dis)
      cmd_distortion(o);
    else if (*sw)
      cmd_sweep(o);
    else if (*ver)
      cmd_verify(o);
    return 0;
  }
  catch (AssertionFailure const &f)
  {
    std::cerr << "assertion failed: " << f.report.dump() << '\n';
    return 1;
  }
  catch (std::exception const &e)
  {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
