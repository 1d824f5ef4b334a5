#include "lsf/io.hpp"
#include "lsf/suites.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace lsf;

TEST(SystemJson, AffineRoundTrip)
{
  auto const F = testkit::diag_pair();
  auto const G = system_from_json(json::parse(to_json(F).dump()));
  ASSERT_EQ(G.size(), F.size());
  for (std::size_t i = 0; i < F.size(); ++i)
  {
    EXPECT_EQ(G[i].matrix(), F[i].matrix());
    EXPECT_EQ(G[i].translation(), F[i].translation());
  }
}

TEST(SystemJson, PerturbedRoundTrip)
{
  auto const F = testkit::perturbed_2d();
  auto const G = system_from_json(to_json(F));
  Vec const x = make_vec({0.2, -0.4});
  for (std::size_t i = 0; i < F.size(); ++i)
  {
    EXPECT_FALSE(G[i].is_affine());
    EXPECT_EQ(G[i].eval(x), F[i].eval(x));
    EXPECT_EQ(G[i].lipschitz(), F[i].lipschitz());
  }
}

TEST(SystemJson, ScalarShorthandIn1D)
{
  auto const F = system_from_json(json::parse(R"({"dim":1,"maps":[{"A":0.5,"b":0.25}]})"));
  EXPECT_EQ(F[0].matrix()(0, 0), 0.5);
  EXPECT_EQ(F[0].translation()(0), 0.25);
}

TEST(SystemJson, MalformedSpecs)
{
  EXPECT_THROW(system_from_json(json::parse(R"({"dim":2,"maps":[{"A":[[0.5]],"b":[0,0]}]})")),
               representation_mismatch);
  EXPECT_THROW(system_from_json(json::parse(R"({"dim":1,"maps":[{"kind":"x","A":0.5,"b":0}]})")),
               domain_error);
  EXPECT_THROW(system_from_json(json::parse(R"({"dim":1,"maps":[{"A":1.5,"b":0}]})")),
               domain_error);
  EXPECT_THROW(load_system("/nonexistent/system.json"), domain_error);
}

TEST(GridJson, RoundTrip)
{
  std::vector<Vec> pts{make_vec({0.1, 0.2}), make_vec({-0.5, 0.3}), make_vec({0.0, -0.9})};
  auto const g = GridSet::from_points(2, 7, pts);
  auto const h = grid_from_json(json::parse(to_json(g).dump()));
  EXPECT_EQ(h.dim(), 2);
  EXPECT_EQ(h.level(), 7);
  EXPECT_EQ(h.cells(), g.cells());
}

TEST(CloudJson, RoundTrip)
{
  PointCloud const p(2, {make_vec({0.1, 0.2}), make_vec({-0.3, 0.4})}, 1e-6);
  auto const q = cloud_from_json(json::parse(to_json(p).dump()));
  ASSERT_EQ(q.points.size(), 2u);
  EXPECT_EQ(q.points[1], p.points[1]);
  EXPECT_EQ(q.resolution, 1e-6);
}

TEST(Fmt, ShortestRoundTrip)
{
  EXPECT_EQ(fmt(0.5), "0.5");
  EXPECT_EQ(fmt(0.1), "0.1");
  double const third = 1.0 / 3.0;
  EXPECT_EQ(std::stod(fmt(third)), third);
  EXPECT_EQ(std::stod(fmt(std::log(2.0) / std::log(3.0))), std::log(2.0) / std::log(3.0));
}

TEST(Csv, CommentsPrecedeTheHeader)
{
  std::ostringstream s;
  write_csv(s, {"a: first", "b: second"}, {"a", "b"}, {{"1", "2"}, {"3", "4"}});
  EXPECT_EQ(s.str(), "# a: first\n# b: second\na,b\n1,2\n3,4\n");
}

TEST(Pgm, HeaderAndPixels)
{
  std::vector<Vec> pts{make_vec({-0.99, 0.0})};
  auto const g = GridSet::from_points(2, 2, pts);
  std::ostringstream s;
  write_pgm(s, g);
  std::string const out = s.str();
  std::string const header = "P5\n8 8\n255\n";
  ASSERT_EQ(out.substr(0, header.size()), header);
  EXPECT_EQ(out.size(), header.size() + 64);
  EXPECT_EQ(std::count(out.begin() + long(header.size()), out.end(), '\0'), 1);
  EXPECT_THROW(write_pgm(s, GridSet::full(1, 3)), representation_mismatch);
}

TEST(Pgm, OneDimensionalRow)
{
  std::ostringstream s;
  write_pgm_1d(s, GridSet::full(1, 3));
  std::string const out = s.str();
  std::string const header = "P5\n16 1\n255\n";
  EXPECT_EQ(out.substr(0, header.size()), header);
  EXPECT_EQ(out.size(), header.size() + 16);
}

TEST(Manifest, HasNoTimestamps)
{
  auto const m = manifest("attractor", {{"t", 0.5}});
  EXPECT_EQ(m["tool"], "lsf");
  EXPECT_EQ(m["command"], "attractor");
  EXPECT_EQ(m["params"]["t"], 0.5);
  EXPECT_EQ(m.dump(), manifest("attractor", {{"t", 0.5}}).dump());
  for (auto const &it : m.items())
  {
    EXPECT_EQ(it.key().find("time"), std::string::npos);
    EXPECT_EQ(it.key().find("date"), std::string::npos);
  }
}

TEST(ReportJson, OscAndSuite)
{
  auto const r = check_osc(make_cantor(), Box{make_vec({-1.0}), make_vec({1.0})});
  auto const j = to_json(r);
  EXPECT_TRUE(j["certified"].get<bool>());
  EXPECT_TRUE(j["invariant"].get<bool>());
  EXPECT_TRUE(j["witness"].is_null());

  SuiteResult s;
  s.name = "x";
  s.expect(true, "ok");
  s.expect(false, "bad");
  auto const js = to_json(s);
  EXPECT_EQ(js["checks"], 2);
  EXPECT_EQ(js["failures"], 1);
  EXPECT_FALSE(s.pass());
}
