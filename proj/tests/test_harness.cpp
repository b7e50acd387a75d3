#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "revanneal/harness/run.hpp"

using namespace revanneal;
using namespace revanneal::harness;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("revanneal_test_" + name);
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int cli(const std::string& args) {
  const std::string cmd = std::string(REVANNEAL_CLI) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(Harness, FormatDoubleUsesSeventeenDigits) {
  EXPECT_EQ(format_double(0.1), "0.10000000000000001");
  EXPECT_EQ(format_double(1.0), "1");
  EXPECT_EQ(format_double(std::numeric_limits<double>::infinity()), "inf");
  EXPECT_EQ(std::stod(format_double(1.0 / 3.0)), 1.0 / 3.0);
}

TEST(Harness, CsvAndJsonlRendering) {
  Table t{"x", {"a", "b", "c"}, {}};
  t.add({1.5, 2LL, std::string("q,\"r\"")});
  EXPECT_EQ(render(t, Format::csv), "a,b,c\n1.5,2,\"q,\"\"r\"\"\"\n");
  Table j{"y", {"v", "ok"}, {}};
  j.add({std::numeric_limits<double>::quiet_NaN(), true});
  EXPECT_EQ(render(j, Format::jsonl), "{\"v\":null,\"ok\":true}\n");
  EXPECT_THROW(t.add({1.0}), std::logic_error);
}

TEST(Harness, ConfigRejectsUnknownKeysAndBadTypes) {
  Config cfg("demo", Schema{{"n", 10}, {"name", "x"}, {"opt", nullptr}, {"list", json::array({1, 2})}});
  EXPECT_THROW(cfg.merge(json{{"bogus", 1}}), ConfigError);
  EXPECT_THROW(cfg.merge(json{{"n", "ten"}}), ConfigError);
  EXPECT_THROW(cfg.merge(json{{"experiment", "other"}}), ConfigError);
  EXPECT_THROW(cfg.apply_override("novalue"), ConfigError);
  cfg.apply_override("n=12");
  cfg.apply_override("name=hello");
  cfg.apply_override("list=[3,4,5]");
  EXPECT_EQ(cfg.integer("n"), 12);
  EXPECT_EQ(cfg.string("name"), "hello");
  EXPECT_EQ(cfg.integers("list"), (std::vector<int>{3, 4, 5}));
  EXPECT_FALSE(cfg.is_set("opt"));
  cfg.apply_override("opt=0.5");
  EXPECT_DOUBLE_EQ(cfg.number("opt"), 0.5);
}

TEST(Harness, EveryExperimentRegistered) {
  for (const char* name : {"phase-diagram", "gap-scaling", "evolve", "error-scaling", "tts", "tts-scaling", "svd",
                           "svd-scan", "potential", "svmc", "ira-cycle", "ira-markov", "ira-spectrum"}) {
    EXPECT_NO_THROW(find_experiment(name)) << name;
  }
  EXPECT_THROW(find_experiment("nope"), ConfigError);
}

TEST(Harness, EvolveWithoutTransverseFieldSucceeds) {
  const fs::path out = scratch("evolve");
  RunRequest req{"evolve", "", {"n=12", "c=1.0", "tau=5", "lambda_override=0", "samples=10"}, out, {1, 0}};
  const json manifest = run(req);
  EXPECT_TRUE(fs::exists(out / "manifest.json"));
  const std::string summary = slurp(out / "summary.csv");
  EXPECT_NE(summary.find("p_e"), std::string::npos);
  // the p_e column of the single data row is exactly zero
  std::istringstream lines(summary);
  std::string header;
  std::string row;
  std::getline(lines, header);
  std::getline(lines, row);
  auto split = [](const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string field; std::getline(in, field, ',');) out.push_back(field);
    return out;
  };
  const auto cols = split(header);
  const auto vals = split(row);
  ASSERT_EQ(cols.size(), vals.size());
  for (std::size_t i = 0; i < cols.size(); ++i) {
    if (cols[i] == "p_e") EXPECT_EQ(vals[i], "0");
  }
}

TEST(Harness, CliExitCodes) {
  const fs::path out = scratch("cli");
  EXPECT_EQ(cli("potential --out " + out.string() + " --set resolution=101"), 0);
  EXPECT_TRUE(fs::exists(out / "potential.csv"));
  EXPECT_TRUE(fs::exists(out / "manifest.json"));
  EXPECT_EQ(cli("potential --out " + out.string() + " --set bogus=1"), 2);
  EXPECT_EQ(cli("potential --out " + out.string() + " --set resolution=50"), 2);
  EXPECT_EQ(cli("nonexistent --out " + out.string()), 2);
  const fs::path cfg = out / "bad.json";
  std::ofstream(cfg) << "{\"n\": 20, \"unknown\": true}";
  EXPECT_EQ(cli("potential --config " + cfg.string() + " --out " + out.string()), 2);
  std::ofstream(cfg) << "{\"n\": 20, \"c\": 0.8}";
  EXPECT_EQ(cli("potential --config " + cfg.string() + " --out " + out.string() + " --set resolution=101"), 0);
}

TEST(Harness, OutputsIndependentOfWorkerCount) {
  const fs::path a = scratch("w1");
  const fs::path b = scratch("w3");
  const std::string args = " --set n=20 --set sweeps=30 --set runs=6 --seed 9";
  ASSERT_EQ(cli("svmc --out " + a.string() + " --workers 1" + args), 0);
  ASSERT_EQ(cli("svmc --out " + b.string() + " --workers 3" + args), 0);
  EXPECT_EQ(slurp(a / "svmc.csv"), slurp(b / "svmc.csv"));
  const json manifest = json::parse(slurp(a / "manifest.json"));
  EXPECT_EQ(manifest["seed"], 9);
  EXPECT_EQ(manifest["experiment"], "svmc");
}

TEST(Harness, JsonlFormat) {
  const fs::path out = scratch("jsonl");
  ASSERT_EQ(cli("ira-spectrum --out " + out.string() + " --set n=6 --set levels=3 --set format=jsonl"), 0);
  EXPECT_TRUE(fs::exists(out / "ira_spectrum.jsonl"));
  std::ifstream in(out / "ira_spectrum.jsonl");
  std::string line;
  std::getline(in, line);
  EXPECT_NO_THROW(json::parse(line));
}
