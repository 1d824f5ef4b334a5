#include <json.hpp>

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace
{

struct Run
{
  int code = -1;
  std::string out;
};

Run run(std::string const &args)
{
  std::string const cmd = std::string(LSF_CLI_PATH) + " " + args + " 2>/dev/null";
  Run r;
  FILE *p = popen(cmd.c_str(), "r");
  if (!p)
    throw std::runtime_error("popen failed");
  std::array<char, 4096> buf;
  std::size_t n = 0;
  while ((n = fread(buf.data(), 1, buf.size(), p)) > 0)
    r.out.append(buf.data(), n);
  int const status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

nlohmann::json run_json(std::string const &args)
{
  auto const r = run(args);
  EXPECT_EQ(r.code, 0) << args;
  return nlohmann::json::parse(r.out);
}

std::string slurp(std::filesystem::path const &p)
{
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::filesystem::path scratch(std::string const &name)
{
  auto const dir = std::filesystem::temp_directory_path() / "lsf_cli_test";
  std::filesystem::create_directories(dir);
  return dir / name;
}

std::string const systems = LSF_SYSTEMS_DIR;

} // namespace

TEST(Cli, AttractorHalfParameter)
{
  auto const j = run_json("attractor --family three_branch --t 0.5 --level 12");
  EXPECT_EQ(j["manifest"]["command"], "attractor");
  double const inner = j["measure_natural"]["inner"], outer = j["measure_natural"]["outer"];
  EXPECT_LE(inner, 0.5);
  EXPECT_GE(outer, 0.5);
  EXPECT_LE(outer - inner, 0.02);
}

TEST(Cli, AttractorDumpAndRender)
{
  auto const out = scratch("cantor.json"), pgm = scratch("cantor.pgm");
  auto const r = run("attractor --family cantor --level 9 --out " + out.string() + " --render " +
                     pgm.string());
  ASSERT_EQ(r.code, 0);
  auto const j = nlohmann::json::parse(slurp(out));
  EXPECT_EQ(j["grid"]["level"], 9);
  EXPECT_EQ(slurp(pgm).substr(0, 3), "P5\n");
}

TEST(Cli, SpecFiles)
{
  auto const j = run_json("attractor --spec " + systems + "/sierpinski.json --level 7 --render " +
                          scratch("sierpinski.pgm").string());
  EXPECT_EQ(j["system"]["maps"], 3);
  EXPECT_EQ(slurp(scratch("sierpinski.pgm")).substr(0, 11), "P5\n256 256\n");

  auto const d = run_json("distortion --spec " + systems + "/diag_2d.json --n 6");
  EXPECT_EQ(d["conformality"]["verdict"], "FLAT-POSITIVE");
  auto const p = run_json("distortion --spec " + systems + "/perturbed_1d.json --n 5");
  EXPECT_EQ(p["conformality"]["verdict"], "CONFORMAL");
}

TEST(Cli, DimensionCantor)
{
  auto const csv = scratch("counts.csv");
  auto const j = run_json("dimension --family cantor --n 7 --levels 2..8 --csv " + csv.string());
  double const lo = j["bracket"]["lower"], hi = j["bracket"]["upper"];
  EXPECT_LE(lo, std::log(2.0) / std::log(3.0));
  EXPECT_GE(hi, std::log(2.0) / std::log(3.0));
  auto const text = slurp(csv);
  EXPECT_EQ(text.rfind("# manifest:", 0), 0u);
  EXPECT_NE(text.find("level,scale,count"), std::string::npos);
}

TEST(Cli, DimensionSimilaritySection)
{
  auto const j = run_json("dimension --family g_lambda --lambda 0.2 --n 5");
  EXPECT_NEAR(j["similarity"]["moran"].get<double>(), std::log(3.0) / std::log(5.0), 1e-12);
  EXPECT_TRUE(j["similarity"]["osc"]["certified"].get<bool>());
}

TEST(Cli, MeasureSweepPasses)
{
  auto const csv = scratch("sweep.csv");
  auto const j = run_json("sweep --kind measure --t-star 0.5 --radius 0.05 --steps 11 --level 10 "
                          "--csv " + csv.string());
  EXPECT_EQ(j["rows"].size(), 11u);
  auto const text = slurp(csv);
  EXPECT_EQ(text[0], '#');
  EXPECT_NE(text.find("manifest:"), std::string::npos);
}

TEST(Cli, FailingSweepExitsOne)
{
  // Around t* = 1/4 the interval case t = 1/2 exceeds the outer measure at t*.
  auto const r = run("sweep --kind measure --t-star 0.25 --radius 0.25 --steps 3 --level 10");
  EXPECT_EQ(r.code, 1);
}

TEST(Cli, VerifySuite)
{
  auto const j = run_json("verify --suite families --seed 3");
  EXPECT_TRUE(j["pass"].get<bool>());
}

TEST(Cli, UsageErrorsExitTwo)
{
  EXPECT_EQ(run("attractor --family three_branch --t 2").code, 2);
  EXPECT_EQ(run("attractor --bogus").code, 2);
  EXPECT_EQ(run("attractor --family cantor --level 30").code, 2);
  EXPECT_EQ(run("attractor --family cantor --spec " + systems + "/sierpinski.json").code, 2);
  EXPECT_EQ(run("attractor --spec /nonexistent.json").code, 2);
  EXPECT_EQ(run("verify --suite nope").code, 2);
  EXPECT_EQ(run("dimension --family cantor --lattice hex").code, 2);
}

TEST(Cli, OutputIsDeterministic)
{
  std::vector<std::string> const commands{
      "attractor --family three_branch --t 0.3 --level 10",
      "dimension --family three_branch --t 0.2 --n 5",
      "distortion --spec " + systems + "/perturbed_1d.json --n 4",
      "verify --suite metric --seed 5"};
  for (auto const &args : commands)
  {
    auto const a = run(args), b = run(args);
    EXPECT_EQ(a.code, 0) << args;
    EXPECT_EQ(a.out, b.out) << args;
  }
}

TEST(Cli, ThreadCountDoesNotChangeResults)
{
  auto a = run_json("--threads 1 attractor --family three_branch --t 0.4 --level 11");
  auto b = run_json("--threads 4 attractor --family three_branch --t 0.4 --level 11");
  a["manifest"]["params"].erase("threads");
  b["manifest"]["params"].erase("threads");
  EXPECT_EQ(a.dump(), b.dump());
}
