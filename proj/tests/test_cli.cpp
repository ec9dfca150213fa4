#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <numbers>
#include <set>
#include <sstream>
#include <srlab/config.hpp>
#include <srlab/spectrum.hpp>

#include <unistd.h>

#include "commands.hpp"

using namespace srlab;
using json = nlohmann::json;

namespace {

std::string fixture(const std::string& name) {
  const char* dir = std::getenv("SRLAB_FIXTURES");
  return std::string(dir ? dir : "fixtures") + "/" + name + ".cfg";
}

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run_srlab(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

std::filesystem::path temp_dir() {
  auto d = std::filesystem::temp_directory_path() / ("srlab_cli_test_" + std::to_string(::getpid()));
  std::filesystem::create_directories(d);
  return d;
}

}  // namespace

TEST(CheckCommand, StructuralVerdicts) {
  auto h = run_srlab({"check", fixture("heisenberg")});
  ASSERT_EQ(h.code, 0) << h.err;
  auto j = json::parse(h.out);
  EXPECT_TRUE(j["fat"]);
  EXPECT_TRUE(j["regular"]);
  EXPECT_EQ(j["Q"], 4);
  EXPECT_EQ(j["degree"], 2);
  EXPECT_TRUE(j["witness"].is_null());
  EXPECT_EQ(j["points"].size(), 27u);
  EXPECT_EQ(j["points"][0]["flag_dims"], json::array({2, 3}));

  auto e = json::parse(run_srlab({"check", fixture("engel")}).out);
  EXPECT_FALSE(e["fat"]);
  EXPECT_EQ(e["Q"], 7);
  EXPECT_EQ(e["degree"], 3);
  ASSERT_FALSE(e["witness"].is_null());
  EXPECT_EQ(e["witness"]["covector"].size(), 2u);

  auto m = run_srlab({"check", fixture("martinet")});
  EXPECT_EQ(m.code, 0);
  auto mj = json::parse(m.out);
  EXPECT_FALSE(mj["regular"]);
  EXPECT_TRUE(mj["Q"].is_null());
  EXPECT_EQ(mj["Q_values"], json::array({4, 5}));

  auto i = run_srlab({"check", fixture("integrable")});
  EXPECT_EQ(i.code, 1);
  EXPECT_FALSE(json::parse(i.out)["bracket_generating"]);

  auto csv = run_srlab({"check", fixture("heisenberg"), "--format", "csv", "--samples", "2"});
  EXPECT_EQ(csv.out.substr(0, csv.out.find('\n')), "point,flag_dims,degree,Q,regular,fat");
  auto rows = csv_rows(csv.out);
  ASSERT_EQ(rows.size(), 8u);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"0 0 0", "2 3", "2", "4", "true", "true"}));
}

TEST(CheckCommand, MalformedConfigExitsTwo) {
  auto r = run_srlab({"check", fixture("broken-fields")});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("line 7"), std::string::npos);
  EXPECT_TRUE(r.out.empty());
}

TEST(CanonicalizeCommand, WritesAdaptedConfig) {
  auto dir = temp_dir();
  auto path = (dir / "h.cfg").string();
  auto r = run_srlab({"canonicalize", fixture("heisenberg-tilted"), "--out", path});
  ASSERT_EQ(r.code, 0) << r.err;
  auto j = json::parse(r.out);
  EXPECT_EQ(j["mode"], "symbolic");
  EXPECT_LT(j["flat_residual"].get<double>(), 1e-12);
  auto adapted = load_config(path);
  EXPECT_EQ(adapted.complement, (std::vector<std::vector<std::string>>{{"0", "0", "1"}}));
  EXPECT_EQ(adapted.density, load_config(fixture("heisenberg-tilted")).density);
  for (const auto& entry : std::filesystem::directory_iterator(dir))
    EXPECT_EQ(entry.path().filename().string().find(".tmp"), std::string::npos);
  std::filesystem::remove_all(dir);

  auto c = json::parse(run_srlab({"canonicalize", fixture("contact3torus")}).out);
  EXPECT_LT(c["flat_residual"].get<double>(), 1e-10);
  EXPECT_FALSE(c["least_squares"]);

  auto e = run_srlab({"canonicalize", fixture("engel")});
  auto ej = json::parse(e.out);
  EXPECT_TRUE(ej["least_squares"]);
  EXPECT_EQ(ej["solvability"][1], "least-squares");

  // The Martinet solve depends on the point, so no config can be written.
  auto m = run_srlab({"canonicalize", fixture("martinet"), "--out", (temp_dir() / "m.cfg").string()});
  EXPECT_EQ(m.code, 1);
  EXPECT_EQ(json::parse(m.out)["mode"], "pointwise");
  EXPECT_FALSE(std::filesystem::exists(temp_dir() / "m.cfg"));
  std::filesystem::remove_all(temp_dir());
}

TEST(SpectrumCommand, SublaplacianMatchesDenseOracle) {
  auto r = run_srlab({"spectrum", fixture("contact3torus"), "--sublaplacian", "-n", "12", "--count", "8", "--solver",
                  "lanczos"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto rows = csv_rows(r.out);
  ASSERT_EQ(rows.size(), 8u);

  auto cfg = load_config(fixture("contact3torus"));
  Rng rng(0);
  auto ext = MetricExtension::canonical(canonical_complement(cfg.structure(), lattice(cfg.periods, 5), rng));
  Grid g = Grid::uniform(cfg.periods, 12);
  auto wf = assemble_weak_laplacian<double>(ext, g);
  auto dense = dense_spectrum(wf.L, wf.M, {.vectors = false});
  for (std::size_t i = 0; i < 8; ++i) {
    EXPECT_EQ(rows[i][0], "inf");
    EXPECT_EQ(rows[i][1], std::to_string(i + 1));
    double lam = std::stod(rows[i][2]);
    EXPECT_NEAR(lam, dense.eigenvalues[i], 1e-8 * std::max(1.0, dense.eigenvalues[i]));
  }
  EXPECT_LT(std::abs(std::stod(rows[0][2])), 1e-10);
}

TEST(SpectrumCommand, TrivialTorusCirculant) {
  auto r = run_srlab({"spectrum", fixture("trivial"), "--eps", "1", "-n", "8", "--count", "10", "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto j = json::parse(r.out);
  std::vector<double> vals;
  for (const auto& e : j["reports"][0]["eigenvalues"]) vals.push_back(e["lambda"].get<double>());
  std::vector<double> expect;
  for (int k = 0; k < 8; ++k)
    for (int l = 0; l < 8; ++l)
      expect.push_back(256 * (std::pow(std::sin(std::numbers::pi * k / 8), 2) + std::pow(std::sin(std::numbers::pi * l / 8), 2)));
  std::sort(expect.begin(), expect.end());
  ASSERT_EQ(vals.size(), 10u);
  for (std::size_t i = 0; i < 10; ++i) EXPECT_NEAR(vals[i], expect[i], 1e-10);
}

TEST(SpectrumCommand, SweepGapsDecrease) {
  auto r = run_srlab({"spectrum", fixture("contact3torus"), "--eps", "2,4,8,16", "-n", "8", "--count", "4", "--format",
                  "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto j = json::parse(r.out);
  auto gap = j["gap"].get<std::vector<std::vector<double>>>();
  ASSERT_EQ(gap.size(), 4u);
  for (std::size_t e = 1; e < gap.size(); ++e)
    for (std::size_t i = 1; i < 4; ++i) EXPECT_LT(gap[e][i], gap[e - 1][i]);
  auto csv = run_srlab({"spectrum", fixture("contact3torus"), "--eps", "2,4,8,16", "-n", "8", "--count", "4"});
  EXPECT_EQ(csv_rows(csv.out).size(), 5u * 4u);
}

TEST(SpectrumCommand, InputErrors) {
  EXPECT_EQ(run_srlab({"spectrum", fixture("heisenberg")}).code, 2);  // not periodic
  EXPECT_EQ(run_srlab({"spectrum", fixture("contact3torus"), "-n", "7"}).code, 2);
  EXPECT_EQ(run_srlab({"spectrum", fixture("contact3torus"), "-n", "8,8"}).code, 2);
  EXPECT_EQ(run_srlab({"spectrum", fixture("contact3torus"), "--eps", "4,2"}).code, 2);
  EXPECT_EQ(run_srlab({"spectrum", fixture("contact3torus"), "--count", "0"}).code, 2);
  EXPECT_EQ(run_srlab({"spectrum", fixture("contact3torus"), "--format", "xml"}).code, 2);
  EXPECT_EQ(run_srlab({"spectrum", "/nonexistent.cfg"}).code, 2);
  EXPECT_EQ(run_srlab({"frobnicate"}).code, 2);
  EXPECT_EQ(run_srlab({}).code, 2);
  auto help = run_srlab({"--help"});
  EXPECT_EQ(help.code, 0);
  EXPECT_NE(help.out.find("spectrum"), std::string::npos);
}

TEST(VerifyCommand, SuitesAndNegativeControl) {
  for (const char* name : {"contact3torus", "heisenberg-tilted", "trivial", "engel"}) {
    auto r = run_srlab({"verify", fixture(name)});
    EXPECT_EQ(r.code, 0) << name << "\n" << r.out;
    auto j = json::parse(r.out);
    EXPECT_TRUE(j["pass"]);
  }
  auto c = json::parse(run_srlab({"verify", fixture("contact3torus")}).out);
  std::set<std::string> suites;
  for (const auto& s : c["suites"]) suites.insert(s["suite"]);
  EXPECT_EQ(suites, (std::set<std::string>{"connection-axioms", "laplacian-lemma", "product-rule", "cartan",
                                           "divergence-lemma", "potential", "strong-vs-weak"}));
  for (const auto& s : c["suites"])
    if (s["suite"] == "strong-vs-weak") EXPECT_NEAR(s["value"].get<double>(), 4.0, 0.5);

  auto bad = run_srlab({"verify", fixture("broken-density"), "--format", "csv"});
  EXPECT_EQ(bad.code, 1);
  EXPECT_NE(bad.out.find("potential,\"reference, config density\""), std::string::npos);
  EXPECT_NE(bad.out.find(",false,"), std::string::npos);
}

TEST(Determinism, SameSeedSameBytes) {
  auto dir = temp_dir();
  std::vector<std::vector<std::string>> commands = {
      {"spectrum", fixture("contact3torus"), "--eps", "2,8", "-n", "10", "--count", "5", "--solver", "lanczos"},
      {"verify", fixture("heisenberg-tilted"), "--seed", "7"},
      {"check", fixture("engel"), "--seed", "3"},
  };
  for (auto args : commands) {
    for (const char* fmt : {"csv", "json"}) {
      std::vector<std::string> contents;
      for (int run = 0; run < 2; ++run) {
        auto path = (dir / ("out" + std::to_string(run))).string();
        auto a = args;
        a.insert(a.end(), {"--format", fmt, "--out", path});
        ASSERT_EQ(run_srlab(a).code, 0);
        std::ifstream in(path, std::ios::binary);
        contents.push_back(std::string(std::istreambuf_iterator<char>(in), {}));
      }
      EXPECT_FALSE(contents[0].empty());
      EXPECT_EQ(contents[0], contents[1]) << args[0] << " " << fmt;
    }
  }
  std::filesystem::remove_all(dir);
}
