#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <cbfed/error.hpp>
#include <cbfed/solver.hpp>

#include "commands.hpp"
#include "config_loader.hpp"

namespace fs = std::filesystem;
using namespace cbfed;
using namespace cbfed::cli;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

class Scratch : public ::testing::Test {
 protected:
  void SetUp() override {
    std::random_device rd;
    dir_ = fs::temp_directory_path() / ("cbfed_cli_" + std::to_string(rd()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path write(const std::string& name, const std::string& text) {
    std::ofstream(dir_ / name) << text;
    return dir_ / name;
  }
  int run(const std::string& command, const fs::path& config, std::vector<std::string> overrides,
          const std::string& out = "out") {
    Options o;
    o.command = command;
    o.config = config;
    o.out = dir_ / out;
    o.overrides = std::move(overrides);
    log_.str("");
    err_.str("");
    return execute(o, log_, err_);
  }
  fs::path only_run(const std::string& out = "out") {
    std::vector<fs::path> dirs;
    for (const auto& e : fs::directory_iterator(dir_ / out)) {
      if (e.is_directory()) dirs.push_back(e.path());
    }
    EXPECT_EQ(dirs.size(), 1u);
    return dirs.empty() ? fs::path{} : dirs.front();
  }

  fs::path dir_;
  std::ostringstream log_;
  std::ostringstream err_;
};

const std::vector<std::string> kSmall{"discretization.n=6", "time.T=0.02", "time.dt=0.002"};

}  // namespace

TEST(Config, EmptyFileGivesDefaults) {
  const auto c = parse_config("", ".");
  const SimConfig d;
  EXPECT_EQ(c.sim.dim, 2);
  EXPECT_EQ(c.sim.cutoff, d.cutoff);
  EXPECT_EQ(c.sim.grid, 3 * d.cutoff);
  EXPECT_DOUBLE_EQ(c.sim.params.mu, d.params.mu);
  EXPECT_DOUBLE_EQ(c.sim.epsilon, d.epsilon);
  EXPECT_EQ(c.sim.laws.size(), 1u);
  EXPECT_EQ(c.sim.laws[0].metadata().name, "zigzag");
  EXPECT_EQ(c.hash.size(), 16u);
}

TEST(Config, GridDefaultsToThreeTimesCutoff) {
  EXPECT_EQ(parse_config("[discretization]\nn = 10\n", ".").sim.grid, 30);
  EXPECT_EQ(parse_config("[discretization]\nn = 10\nN = 21\n", ".").sim.grid, 21);
}

TEST(Config, RejectsPumpingAboveAbsorption) {
  try {
    parse_config("[physics]\nr = 2\nq = 3\n", ".");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("q < r required"), std::string::npos) << e.what();
  }
}

TEST(Config, AggregatesEveryProblem) {
  try {
    parse_config("[physics]\nmu = 0\n[time]\ndt = 0.3\nT = 1\nscheme = 'euler'\n[nope]\n", ".");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("mu > 0"), std::string::npos) << msg;
    EXPECT_NE(msg.find("scheme"), std::string::npos) << msg;
    EXPECT_NE(msg.find("nope"), std::string::npos) << msg;
  }
}

TEST(Config, ReportsParseErrorLine) {
  try {
    parse_config("[physics]\nmu = = 1\n", ".");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos) << e.what();
  }
}

TEST(Config, OverridesReplaceValues) {
  const auto c = parse_config("[physics]\nmu = 0.5\n", ".",
                              {"physics.mu=0.25", "time.scheme=IFRK2", "law.name=zero"});
  EXPECT_DOUBLE_EQ(c.sim.params.mu, 0.25);
  EXPECT_EQ(c.sim.scheme, Scheme::IFRK2);
  EXPECT_TRUE(c.sim.laws[0].is_zero());
  EXPECT_THROW(parse_config("", ".", {"physics.mu"}), ConfigError);
}

TEST(Config, HashTracksContentNotLayout) {
  const auto a = parse_config("[physics]\nmu = 0.5\nalpha = 1\n", ".");
  const auto b = parse_config("# comment\n[physics]\nalpha = 1.0\nmu = 0.5\n", ".");
  const auto c = parse_config("[physics]\nmu = 0.5\nalpha = 2\n", ".");
  EXPECT_EQ(a.hash, b.hash);
  EXPECT_NE(a.hash, c.hash);
}

TEST(Config, UniquenessWarningForLowViscosity) {
  const auto c = parse_config(
      "[domain]\ndim = 3\n[physics]\nr = 3\nmu = 0.4\n[initial]\nkind = 'random'\n", ".");
  const auto w = command_warnings(c, "uniqueness");
  ASSERT_EQ(w.size(), 1u);
  EXPECT_NE(w[0].find("2βμ > 1"), std::string::npos);
  EXPECT_TRUE(command_warnings(c, "simulate").empty());
}

TEST_F(Scratch, LawFileResolvesAgainstConfigDir) {
  write("ramp.json",
        R"({"name": "ramp", "breaks": [0.0], "pieces": [{"type": "affine", "a": 0, "b": -1},)"
        R"( {"type": "affine", "a": 0, "b": 1}], "phi": 0.0, "C1": 1.0, "C2": 0.0})");
  const auto cfg = write("c.toml", "[law]\nname = 'ramp.json'\n");
  const auto c = load_config(cfg);
  EXPECT_EQ(c.sim.laws[0].metadata().name, "ramp");
  EXPECT_DOUBLE_EQ(c.sim.laws[0](0.5), 1.0);
}

TEST_F(Scratch, ZeroHorizonGivesSingleRow) {
  ASSERT_EQ(run("simulate", {}, {"discretization.n=6", "time.T=0"}), kPass) << err_.str();
  const auto ledger = EnergyLedger::from_csv(slurp(only_run() / "ledger.csv"));
  ASSERT_EQ(ledger.rows.size(), 1u);
  EXPECT_EQ(ledger.rows[0].t, 0.0);
}

TEST_F(Scratch, RunDirectoryIsComplete) {
  ASSERT_EQ(run("simulate", {}, kSmall), kPass) << err_.str();
  const auto d = only_run();
  EXPECT_TRUE(fs::exists(d / "config.toml"));
  EXPECT_TRUE(fs::exists(d / "snapshots/index.csv"));
  const auto m = nlohmann::json::parse(slurp(d / "manifest.json"));
  EXPECT_EQ(m["config_hash"], d.filename().string());
  EXPECT_EQ(m["command"], "simulate");
  EXPECT_EQ(m["rerun"], "cbfed simulate --config config.toml");
  for (const auto& f : m["files"]) EXPECT_TRUE(fs::exists(d / f.get<std::string>())) << f;
}

TEST_F(Scratch, RerunFromWrittenConfigIsByteIdentical) {
  ASSERT_EQ(run("simulate", {}, kSmall, "a"), kPass) << err_.str();
  const auto first = only_run("a");
  ASSERT_EQ(run("simulate", first / "config.toml", {}, "b"), kPass) << err_.str();
  const auto second = only_run("b");
  EXPECT_EQ(first.filename(), second.filename());
  EXPECT_EQ(slurp(first / "ledger.csv"), slurp(second / "ledger.csv"));
}

TEST_F(Scratch, CustomLawSurvivesRerun) {
  write("ramp.json",
        R"({"name": "ramp", "breaks": [0.0], "pieces": [{"type": "affine", "a": 0, "b": -1},)"
        R"( {"type": "affine", "a": 0, "b": 1}], "phi": 0.0, "C1": 1.0, "C2": 0.0})");
  const auto cfg = write("c.toml", "[law]\nname = 'ramp.json'\n");
  ASSERT_EQ(run("simulate", cfg, kSmall, "a"), kPass) << err_.str();
  const auto first = only_run("a");
  ASSERT_EQ(run("simulate", first / "config.toml", {}, "b"), kPass) << err_.str();
  EXPECT_EQ(slurp(first / "ledger.csv"), slurp(only_run("b") / "ledger.csv"));
}

TEST_F(Scratch, LawInspectSamplesTheLaw) {
  ASSERT_EQ(run("law-inspect", {}, {}), kPass) << err_.str();
  const auto text = slurp(only_run() / "law_inspect.csv");
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "xi,theta,theta_eps,env_lower,env_upper,clarke_lower,clarke_upper,j");
  std::size_t rows = 0;
  bool found = false;
  while (std::getline(in, line)) {
    ++rows;
    if (line.rfind("0.5,", 0) == 0) {
      found = true;
      EXPECT_EQ(line.substr(0, 8), "0.5,1.5,");
    }
  }
  EXPECT_EQ(rows, 1001u);
  EXPECT_TRUE(found);
  const auto rep = nlohmann::json::parse(slurp(only_run() / "reports/law-inspect.json"));
  EXPECT_TRUE(rep["pass"].get<bool>());
}

TEST_F(Scratch, InadmissibleUniquenessRegimeIsRefused) {
  const int code = run("uniqueness", {},
                       {"domain.dim=3", "physics.r=3", "physics.mu=0.4", "initial.kind='random'",
                        "discretization.n=4"});
  EXPECT_EQ(code, kConfigError);
  EXPECT_NE(err_.str().find("2βμ ≤ 1"), std::string::npos) << err_.str();
  const auto f = nlohmann::json::parse(slurp(only_run() / "failure.json"));
  EXPECT_EQ(f["kind"], "regime_error");
}

TEST_F(Scratch, BadConfigWritesFailureAtRoot) {
  const auto cfg = write("c.toml", "[physics]\nr = 2\nq = 3\n");
  EXPECT_EQ(run("simulate", cfg, {}), kConfigError);
  const auto f = nlohmann::json::parse(slurp(dir_ / "out/failure.json"));
  EXPECT_EQ(f["status"], 3);
  EXPECT_NE(f["message"].get<std::string>().find("q < r required"), std::string::npos);
}

TEST_F(Scratch, BlowUpExitCode) {
  const int code = run("simulate", {},
                       {"discretization.n=4", "physics.alpha=-200", "physics.beta=0",
                        "law.name='zero'", "time.T=1", "time.dt=0.01"});
  EXPECT_EQ(code, kBlowUp) << err_.str();
  const auto f = nlohmann::json::parse(slurp(only_run() / "failure.json"));
  EXPECT_EQ(f["kind"], "blow_up");
  EXPECT_GT(f["t"].get<double>(), 0.0);
}

TEST_F(Scratch, StudiesPassOnSmallRun) {
  for (const std::string c : {"energy-report", "hvi-check", "uniqueness"}) {
    EXPECT_EQ(run(c, {}, kSmall), kPass) << c << ": " << err_.str();
  }
  const auto d = only_run();
  for (const std::string c : {"energy-report", "hvi-check", "uniqueness"}) {
    const auto rep = nlohmann::json::parse(slurp(d / ("reports/" + c + ".json")));
    EXPECT_EQ(rep["study"], c);
    EXPECT_TRUE(rep["pass"].get<bool>()) << c;
  }
}

TEST_F(Scratch, ConvergeWritesTables) {
  ASSERT_EQ(run("converge", {}, {"discretization.n=6", "time.T=0.02", "time.dt=0.002",
                                 "converge.dt=[0.002, 0.001]"}),
            kPass)
      << err_.str();
  const auto rep = nlohmann::json::parse(slurp(only_run() / "reports/converge.json"));
  EXPECT_EQ(rep["tables"]["ladders"].size(), 2u);
}
