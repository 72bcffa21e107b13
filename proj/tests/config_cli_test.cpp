#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "sdot/report.hpp"
#include "support.hpp"

namespace sdot {
namespace {

namespace fs = std::filesystem;
using testing::config_path;

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TEST(ParseNumber, FormsAndErrors) {
  EXPECT_DOUBLE_EQ(parse_number(Json(0.25), "x"), 0.25);
  EXPECT_DOUBLE_EQ(parse_number(Json("0.125"), "x"), 0.125);
  EXPECT_DOUBLE_EQ(parse_number(Json("1/3"), "x"), 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(parse_number(Json("-2/8"), "x"), -0.25);
  EXPECT_THROW(parse_number(Json("1/0"), "x"), ValidationError);
  EXPECT_THROW(parse_number(Json("abc"), "x"), ValidationError);
  try {
    parse_number(Json(true), "target.weights");
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("target.weights"), std::string::npos);
  }
}

TEST(Overrides, DottedPathsAndValues) {
  Json c = load_config_file(config_path("symmetric-1d"));
  apply_override(c, "experiment.eps_grid.count=8");
  apply_override(c, "experiment.functional=l2");
  apply_override(c, "experiment.new.key=[1,2]");
  EXPECT_EQ(c["experiment"]["eps_grid"]["count"], 8);
  EXPECT_EQ(c["experiment"]["functional"], "l2");
  EXPECT_EQ(c["experiment"]["new"]["key"], Json::array({1, 2}));
  EXPECT_EQ(setting(c, "experiment.functional", std::string("pairing")), "l2");
  EXPECT_DOUBLE_EQ(setting(c, "experiment.eps_grid.count", 0.0), 8.0);
  EXPECT_DOUBLE_EQ(setting(c, "experiment.missing", 3.5), 3.5);
  EXPECT_THROW(apply_override(c, "no_equals_sign"), ArgumentError);
}

TEST(BuildProblem, CollectsEveryViolation) {
  Json c = load_config_file(config_path("asymmetric-1d"));
  c["source"].erase("density_min");
  c["target"]["weights"] = Json::array({"-1/2", "3/2"});
  try {
    build_problem(c);
    FAIL();
  } catch (const ValidationError& e) {
    ASSERT_GE(e.violations().size(), 2u);
    std::string all;
    for (const auto& v : e.violations()) all += v + "\n";
    EXPECT_NE(all.find("source.density_min"), std::string::npos);
    EXPECT_NE(all.find("must be positive"), std::string::npos);
  }
}

TEST(BuildProblem, RandomTargetIsSeeded) {
  const ProblemConfig a = testing::shipped("2d-random-8-sites");
  const ProblemConfig b = testing::shipped("2d-random-8-sites");
  ASSERT_EQ(a.target.size(), 8u);
  for (std::size_t i = 0; i < 8; ++i) {
    EXPECT_EQ(a.target.point(i), b.target.point(i));
    EXPECT_GE(a.target.point(i).minCoeff(), 0.05);
    EXPECT_LE(a.target.point(i).maxCoeff(), 0.95);
  }
  EXPECT_NEAR(a.target.weights().sum(), 1.0, 1e-15);
}

TEST(Report, HashesAndFormatting) {
  EXPECT_EQ(fnv1a(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a("a"), 0xaf63dc4c8601ec8cULL);
  EXPECT_EQ(fnv1a("foobar"), 0x85944171f73967e8ULL);
  const Json c = load_config_file(config_path("symmetric-1d"));
  EXPECT_EQ(config_hash(c).size(), 16u);
  EXPECT_EQ(config_hash(c), config_hash(load_config_file(config_path("symmetric-1d"))));
  EXPECT_NE(config_hash(c), config_hash(load_config_file(config_path("asymmetric-1d"))));
  EXPECT_EQ(std::stod(format_number(0.1)), 0.1);
  EXPECT_EQ(std::stod(format_number(1.0 / 3.0)), 1.0 / 3.0);
}

TEST(Report, CsvQuotingAndUnwritableDir) {
  const fs::path dir = fs::path(SDOT_SCRATCH) / "report";
  fs::remove_all(dir);
  ensure_output_dir(dir.string());
  write_csv((dir / "t.csv").string(), Table{{"a", "b"}, {{"1", "x,y"}, {"2", "say \"hi\""}}});
  EXPECT_EQ(slurp(dir / "t.csv"), "a,b\n1,\"x,y\"\n2,\"say \"\"hi\"\"\"\n");
  EXPECT_THROW(ensure_output_dir((dir / "t.csv" / "sub").string()), IoError);
}

// End-to-end runs of the command-line tool.
struct LabRun {
  int code;
  std::string out;
  std::string err;
};

LabRun lab(const std::string& args, const std::string& tag) {
  const fs::path dir = fs::path(SDOT_SCRATCH) / ("cli_" + tag);
  fs::create_directories(dir);
  const std::string cmd =
      std::string(SDOT_LAB) + " " + args + " > " + (dir / "stdout").string() + " 2> " + (dir / "stderr").string();
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(dir / "stdout"), slurp(dir / "stderr")};
}

std::string out_dir(const std::string& tag) {
  const fs::path p = fs::path(SDOT_SCRATCH) / ("out_" + tag);
  fs::remove_all(p);
  return p.string();
}

TEST(Cli, SolveAsymmetric) {
  const std::string out = out_dir("solve");
  const LabRun r = lab("solve --config " + config_path("asymmetric-1d") + " --out " + out, "solve");
  ASSERT_EQ(r.code, 0) << r.err;
  const Json s = Json::parse(slurp(fs::path(out) / "summary.json"));
  EXPECT_NEAR(s["z"][0].get<double>(), 1.0 / 3.0, 1e-12);
  EXPECT_NEAR(s["z"][1].get<double>(), -1.0 / 3.0, 1e-12);
  EXPECT_EQ(s["config"]["name"], "asymmetric-1d");
  const Json m = Json::parse(slurp(fs::path(out) / "meta.json"));
  EXPECT_EQ(m["config_hash"], s["config_hash"]);
  EXPECT_EQ(m["seed"], 2024);
  EXPECT_TRUE(m["versions"].contains("sdot_lab"));
}

TEST(Cli, RatesSymmetric) {
  const std::string out = out_dir("rates");
  const LabRun r = lab("rates --config " + config_path("symmetric-1d") + " --out " + out + " --svg", "rates");
  ASSERT_EQ(r.code, 0) << r.err;
  std::ifstream csv(fs::path(out) / "results.csv");
  std::string line;
  int rows = -1;
  while (std::getline(csv, line)) ++rows;
  EXPECT_EQ(rows, 16);
  const Json s = Json::parse(slurp(fs::path(out) / "summary.json"));
  EXPECT_NEAR(s["slope"].get<double>(), 2.0, 0.1);
  EXPECT_TRUE(fs::exists(fs::path(out) / "plot.svg"));
}

TEST(Cli, ByteIdenticalReruns) {
  for (const std::string cmd : {"rates", "clt"}) {
    std::string texts[2][2];
    for (int k = 0; k < 2; ++k) {
      const std::string out = out_dir(cmd + std::to_string(k));
      const std::string extra = cmd == "clt" ? " --set experiment.clt.trials=16 --threads 2" : "";
      const LabRun r = lab(cmd + " --config " + config_path("asymmetric-1d") + " --out " + out + extra, cmd);
      ASSERT_EQ(r.code, 0) << r.err;
      texts[k][0] = slurp(fs::path(out) / "results.csv");
      texts[k][1] = slurp(fs::path(out) / "summary.json");
    }
    EXPECT_FALSE(texts[0][0].empty());
    EXPECT_EQ(texts[0][0], texts[1][0]);
    EXPECT_EQ(texts[0][1], texts[1][1]);
  }
}

TEST(Cli, MissingDensityMinNamesTheField) {
  Json c = load_config_file(config_path("symmetric-1d"));
  c["source"].erase("density_min");
  const fs::path cfg = fs::path(SDOT_SCRATCH) / "no_density_min.json";
  std::ofstream(cfg) << c.dump(2);
  const LabRun r = lab("solve --config " + cfg.string() + " --out " + out_dir("bad"), "bad");
  EXPECT_EQ(r.code, 2);
  const Json e = Json::parse(r.err);
  EXPECT_EQ(e["error"]["type"], "validation");
  EXPECT_NE(e["error"].dump().find("density_min"), std::string::npos);
}

TEST(Cli, UnwritableOutputIsAnIoError) {
  const fs::path file = fs::path(SDOT_SCRATCH) / "plain_file";
  std::ofstream(file) << "x";
  const LabRun r = lab("solve --config " + config_path("symmetric-1d") + " --out " + (file / "out").string(), "io");
  EXPECT_EQ(r.code, 3);
  EXPECT_EQ(Json::parse(r.err)["error"]["type"], "io");
}

TEST(Cli, UnknownFileIsAnIoError) {
  const LabRun r = lab("solve --config /nonexistent.json --out " + out_dir("nofile"), "nofile");
  EXPECT_EQ(r.code, 3);
}

TEST(Cli, OverrideChangesTheRun) {
  const std::string out = out_dir("override");
  const LabRun r = lab("rates --config " + config_path("symmetric-1d") + " --out " + out +
                        " --set experiment.functional=l2 --set experiment.eps_grid.count=8",
                    "override");
  ASSERT_EQ(r.code, 0) << r.err;
  const Json s = Json::parse(slurp(fs::path(out) / "summary.json"));
  EXPECT_EQ(s["functional"], "l2");
  EXPECT_EQ(s["config"]["experiment"]["functional"], "l2");
  EXPECT_NEAR(s["slope"].get<double>(), 1.0, 0.1);
}

}  // namespace
}  // namespace sdot
