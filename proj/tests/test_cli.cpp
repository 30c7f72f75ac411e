#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / (std::string("analytica_cli_") + info->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  // In-process run of the command line.
  static int run(std::vector<std::string> args) {
    args.insert(args.begin(), "analytica");
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    return analytica::cli::run(static_cast<int>(argv.size()), argv.data());
  }

  // The installed binary, with stderr captured to a file.
  int spawn(const std::string& args) const {
    const std::string cmd = std::string(ANALYTICA_CLI_PATH) + " " + args + " >" + path("stdout") + " 2>" + path("stderr");
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  static std::string slurp(const std::string& file) {
    std::ifstream in(file);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  static json load(const std::string& file) { return json::parse(slurp(file)); }

 private:
  fs::path dir_;
};

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

}  // namespace

TEST_F(Cli, ProbePolynomialPassesEverySphere) {
  EXPECT_EQ(run({"probe", "--expr", "x1^2+x2*x3", "--n", "3", "--spheres", "50", "--out", path("r.json")}), 0);
  const json r = load(path("r.json"));
  EXPECT_EQ(r["checked"], 50);
  EXPECT_EQ(r["passed"], 50);
  EXPECT_TRUE(r["failures"].empty());
  EXPECT_EQ(r["config"]["seed"], analytica::cli::kDefaultSeed);
}

TEST_F(Cli, ProbeHartogsExitsWithADiagnostic) {
  EXPECT_EQ(spawn("probe --builtin hartogs-f --spheres 10 --out " + path("r.json")), 2);
  const json r = load(path("r.json"));
  EXPECT_LT(r["passed"].get<int>(), r["checked"].get<int>());
  const json& f = r["failures"].at(0);
  EXPECT_EQ(f["witness"].size(), 3u);
  EXPECT_TRUE(f.contains("sphere"));
  EXPECT_TRUE(f.contains("residual"));
}

TEST_F(Cli, SeedFromTheEnvironment) {
  ::setenv("ANALYTICA_SEED", "77", 1);
  EXPECT_EQ(run({"probe", "--expr", "x1", "--n", "3", "--spheres", "3", "--out", path("a.json")}), 0);
  EXPECT_EQ(run({"probe", "--expr", "x1", "--n", "3", "--spheres", "3", "--seed", "5", "--out", path("b.json")}), 0);
  ::unsetenv("ANALYTICA_SEED");
  EXPECT_EQ(load(path("a.json"))["config"]["seed"], 77);
  EXPECT_EQ(load(path("b.json"))["config"]["seed"], 5);
}

TEST_F(Cli, ProbeIsByteIdenticalAcrossWorkers) {
  const std::string base = "probe --builtin curve-g --spheres 16 --seed 3 --out ";
  EXPECT_EQ(spawn(base + path("w1.json") + " --workers 1"), 2);
  EXPECT_EQ(spawn(base + path("w4.json") + " --workers 4"), 2);
  EXPECT_EQ(slurp(path("w1.json")), slurp(path("w4.json")));
}

TEST_F(Cli, EmptyScanPlotHasOnlyAHeader) {
  EXPECT_EQ(run({"probe", "--expr", "x1", "--n", "3", "--spheres", "0", "--out", path("r.json"), "--plot",
                 path("scan.csv")}),
            0);
  EXPECT_EQ(slurp(path("scan.csv")), "sphere,residual\n");
}

TEST_F(Cli, ScanPlotHasOneRowPerSphere) {
  run({"probe", "--builtin", "hartogs-f", "--spheres", "5", "--out", path("r.json"), "--plot", path("scan.csv")});
  const auto rows = lines(slurp(path("scan.csv")));
  ASSERT_EQ(rows.size(), 6u);
  EXPECT_EQ(rows[0], "sphere,residual");
  EXPECT_EQ(rows[1].substr(0, 2), "0,");
}

TEST_F(Cli, CurveGCounterexample) {
  EXPECT_EQ(spawn("counterexamples --name curve-g --spheres 10 --out " + path("g.json")), 2);
  const json g = load(path("g.json"));
  EXPECT_TRUE(g["counterexample_detected"].get<bool>());
  bool found = false;
  for (const auto& p : g["paths"]) {
    if (p["t"] != 0.01) continue;
    found = true;
    EXPECT_LT(p["axis"].get<double>(), 1e-7);
    EXPECT_GT(p["cusp"].get<double>(), 1e6);
  }
  EXPECT_TRUE(found);
  EXPECT_NE(g["plane_z0"]["verdict"], "pass");
  EXPECT_EQ(g["plane_z0"]["witness"].size(), 3u);
}

TEST_F(Cli, HartogsCounterexamplePlot) {
  EXPECT_EQ(run({"counterexamples", "--name", "hartogs-f", "--spheres", "10", "--out", path("h.json"), "--plot",
                 path("h.csv")}),
            2);
  const auto rows = lines(slurp(path("h.csv")));
  ASSERT_GE(rows.size(), 3u);
  EXPECT_EQ(rows[0], "t,diagonal,axis");
  EXPECT_EQ(rows[2], "0.10000000000000001,333.33333333333331,0");
  const json h = load(path("h.json"));
  EXPECT_TRUE(h["slices_pass"].get<bool>());
  EXPECT_EQ(h["slices"].size(), 12u);
}

TEST_F(Cli, ReconstructGlueFixture) {
  EXPECT_EQ(run({"reconstruct", "glue", "--input", std::string(ANALYTICA_SAMPLES_DIR) + "/restrictions.json", "--out",
                 path("form.json")}),
            0);
  const analytica::HomogeneousForm f = analytica::io::form_from_json(load(path("form.json")));
  EXPECT_EQ(f, analytica::HomogeneousForm::linear(analytica::RVec{1, 2, 3}));
}

TEST_F(Cli, ReconstructGlueRejectsIncompatibleInput) {
  json fixture = load(std::string(ANALYTICA_SAMPLES_DIR) + "/restrictions.json");
  fixture["restrictions"][1]["form"]["terms"][0]["num"] = "5";
  std::ofstream(path("bad.json")) << fixture.dump();
  EXPECT_EQ(run({"reconstruct", "glue", "--input", path("bad.json"), "--out", path("form.json")}), 2);
  EXPECT_TRUE(load(path("form.json")).contains("error"));
}

TEST_F(Cli, ReconstructCone) {
  EXPECT_EQ(run({"reconstruct", "cone", "--expr", "x1*x2 + x3^2", "--n", "3", "--degree", "2", "--out",
                 path("form.json")}),
            0);
  const json r = load(path("form.json"));
  EXPECT_EQ(r["held_out_residual"], "0");
  const analytica::HomogeneousForm f = analytica::io::form_from_json(r["form"]);
  EXPECT_EQ(f, analytica::HomogeneousForm::monomial({1, 1, 0}) + analytica::HomogeneousForm::monomial({0, 0, 2}));
  EXPECT_EQ(run({"reconstruct", "cone", "--expr", "x1^2 + x2^2 + x3^2", "--n", "3", "--degree", "1", "--out",
                 path("bad.json")}),
            2);
}

TEST_F(Cli, TowerWritesOneCsvPerDiagnosticLine) {
  const std::string dir = path("plots");
  EXPECT_EQ(run({"tower", "--expr", "1/(1-x1)", "--n", "3", "--order", "6", "--out", path("t.json"), "--plot-dir", dir}),
            0);
  const json t = load(path("t.json"));
  EXPECT_EQ(t["R"], 6);
  EXPECT_EQ(t["forms"].size(), 7u);
  EXPECT_EQ(t["diagnostics"]["line_radii"].size(), 3u);
  EXPECT_EQ(t["diagnostics"]["line_radii"][1]["radius"], "inf");
  for (int k = 0; k < 3; ++k) {
    const auto rows = lines(slurp(dir + "/line" + std::to_string(k) + ".csv"));
    ASSERT_EQ(rows.size(), 42u);
    EXPECT_EQ(rows[0], "t,f,T");
  }
}

TEST_F(Cli, TowerFailureIsADiagnostic) {
  EXPECT_EQ(spawn("tower --builtin hartogs-f --order 4 --out " + path("t.json")), 2);
  EXPECT_TRUE(load(path("t.json")).contains("error"));
}

TEST_F(Cli, TowerCertify) {
  EXPECT_EQ(run({"tower", "--expr", "x1^2+x2*x3", "--n", "3", "--certify", "--out", path("c.json")}), 0);
  const json c = load(path("c.json"));
  EXPECT_EQ(c["verdict"], "pass");
  EXPECT_EQ(c["sweep_residuals"].size(), 8u);
}

TEST_F(Cli, InvertPointAndSphere) {
  EXPECT_EQ(run({"invert", "--point", "2,0,0", "--out", path("p.json")}), 0);
  const json p = load(path("p.json"));
  EXPECT_EQ(p["image"], json::array({"1/2", "0", "0"}));
  EXPECT_EQ(run({"invert", "--point", "3,0,0", "--center", "1,0,0", "--out", path("c.json")}), 0);
  EXPECT_EQ(load(path("c.json"))["image"], json::array({"3/2", "0", "0"}));
  EXPECT_EQ(run({"invert", "--sphere-json", std::string(ANALYTICA_SAMPLES_DIR) + "/sphere.json", "--out", path("s.json")}),
            0);
  const json s = load(path("s.json"));
  EXPECT_EQ(s["plane"]["base"], json::array({"8/5", "0", "4/5"}));
  EXPECT_TRUE(s["inside_unit_ball"].get<bool>());
}

TEST_F(Cli, UsageErrors) {
  EXPECT_EQ(spawn("probe --expr \"x1 +* 2\" --n 3"), 1);
  EXPECT_NE(slurp(path("stderr")).find("offset 4"), std::string::npos);
  EXPECT_EQ(spawn("frobnicate"), 1);
  EXPECT_EQ(spawn("probe --expr x1"), 1);
  EXPECT_EQ(spawn("probe --expr x1 --n 3 --workers 0"), 1);
  EXPECT_EQ(spawn("invert"), 1);
  EXPECT_EQ(spawn("reconstruct glue --input " + path("missing.json")), 1);
  EXPECT_EQ(spawn("--help"), 0);
}
