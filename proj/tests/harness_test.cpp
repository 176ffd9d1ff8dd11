#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>
#include <string>

#include "storoo/analysis.hpp"
#include "storoo/cli.hpp"
#include "storoo/harness.hpp"

using namespace storoo;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("storoo_harness_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> data_lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line[0] != '#') out.push_back(line);
  }
  return out;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream in(line);
  for (std::string cell; std::getline(in, cell, ',');) out.push_back(cell);
  return out;
}

ExperimentConfig small_config() {
  ExperimentConfig c;
  c.tau = 0.9;
  c.method = {"kl", "hoeffding"};
  c.budgets = {100, 300};
  c.replications = 3;
  c.grid_resolution = 2001;
  return c;
}

int cli(std::vector<std::string> args, std::string* out_text = nullptr,
        std::string* err_text = nullptr) {
  std::ostringstream out, err;
  const int code = cli_main(args, out, err);
  if (out_text) *out_text = out.str();
  if (err_text) *err_text = err.str();
  return code;
}

}  // namespace

TEST(MethodSpec, Parsing) {
  EXPECT_EQ(parse_method_spec("kl", SupportMode::kOracle).support_mode,
            SupportMode::kConservative);
  const MethodSpec t = parse_method_spec("thomas-o", SupportMode::kConservative);
  EXPECT_EQ(t.method, BoundMethod::kThomas);
  EXPECT_EQ(t.support_mode, SupportMode::kOracle);
  EXPECT_EQ(t.label, "thomas-o");
  EXPECT_EQ(parse_method_spec("brown", SupportMode::kOracle).support_mode, SupportMode::kOracle);
  EXPECT_THROW(parse_method_spec("kl-o", SupportMode::kConservative), std::invalid_argument);
  EXPECT_THROW(parse_method_spec("bogus", SupportMode::kConservative), std::invalid_argument);
}

TEST(Config, JsonRoundTripAndErrors) {
  ExperimentConfig c = small_config();
  c.functional = Functional::kCvar;
  c.method = {"brown", "thomas-o"};
  c.ab_mode = SupportMode::kOracle;
  c.return_rule = ReturnRule::kDeepestExpanded;
  c.base_seed = 123456789012345ULL;
  const ExperimentConfig back = config_from_json(config_to_json(c));
  EXPECT_EQ(config_to_json(back), config_to_json(c));
  EXPECT_EQ(back.base_seed, c.base_seed);

  EXPECT_EQ(config_from_json(nlohmann::json{{"method", "bernstein"}}).method,
            std::vector<std::string>{"bernstein"});
  EXPECT_THROW(config_from_json(nlohmann::json{{"methods", "kl"}}), std::invalid_argument);
  EXPECT_THROW(config_from_json(nlohmann::json{{"tau", "high"}}), std::invalid_argument);
  EXPECT_THROW(config_from_json(nlohmann::json{{"ab_mode", "sometimes"}}), std::invalid_argument);
  EXPECT_THROW(config_from_json(nlohmann::json::array()), std::invalid_argument);
}

TEST(Config, Validation) {
  auto invalid = [](auto mutate) {
    ExperimentConfig c = small_config();
    mutate(c);
    EXPECT_THROW(c.validate(), std::invalid_argument);
  };
  EXPECT_NO_THROW(small_config().validate());
  invalid([](ExperimentConfig& c) { c.budgets = {300, 100}; });
  invalid([](ExperimentConfig& c) { c.budgets = {100, 100}; });
  invalid([](ExperimentConfig& c) { c.budgets.clear(); });
  invalid([](ExperimentConfig& c) { c.replications = 0; });
  invalid([](ExperimentConfig& c) { c.eta = 1.0; });
  invalid([](ExperimentConfig& c) { c.tau = 1.0; });
  invalid([](ExperimentConfig& c) { c.method = {"brown"}; });
  invalid([](ExperimentConfig& c) { c.method = {"kl", "kl"}; });
  invalid([](ExperimentConfig& c) { c.k = 1; });
  invalid([](ExperimentConfig& c) { c.beta = 0.0; });
}

TEST(RunExperiment, ShapeAndAggregation) {
  ExperimentConfig c = small_config();
  c.method = {"bernstein"};
  c.budgets = {100};
  c.replications = 2;
  const RegretTable t = run_experiment(c, ObjectiveRegistry::with_builtins());
  ASSERT_EQ(t.rows.size(), 1u);
  EXPECT_EQ(t.rows[0].replications.size(), 2u);
  EXPECT_EQ(t.rows[0].replications[0].seed, 1u);
  EXPECT_EQ(t.rows[0].replications[1].seed, 2u);

  const RegretTable big = run_experiment(small_config(), ObjectiveRegistry::with_builtins());
  EXPECT_EQ(big.rows.size(), 4u);
  for (const auto& row : big.rows) {
    ASSERT_EQ(row.replications.size(), 3u);
    double sum = 0.0;
    for (const auto& r : row.replications) {
      EXPECT_EQ(r.regret_clamped, std::max(r.regret_raw, 0.0));
      sum += r.regret_clamped;
    }
    const double mean = sum / 3.0;
    double ss = 0.0;
    for (const auto& r : row.replications) ss += (r.regret_clamped - mean) * (r.regret_clamped - mean);
    EXPECT_NEAR(row.mean_regret, mean, 1e-12);
    EXPECT_NEAR(row.stderr_regret, std::sqrt(ss / 2.0) / std::sqrt(3.0), 1e-12);
  }
  ASSERT_NE(big.find("kl", 300), nullptr);
  EXPECT_EQ(big.find("kl", 301), nullptr);
}

TEST(RunExperiment, RejectsMissingOracle) {
  ExperimentConfig c = small_config();
  c.objective = "phi2";
  c.functional = Functional::kCvar;
  c.method = {"brown"};
  EXPECT_THROW(run_experiment(c, ObjectiveRegistry::with_builtins()), std::invalid_argument);
  c.objective = "nope";
  c.functional = Functional::kQuantile;
  c.method = {"kl"};
  EXPECT_THROW(run_experiment(c, ObjectiveRegistry::with_builtins()), std::invalid_argument);
}

TEST(RunExperiment, WorkerCountDoesNotChangeOutput) {
  const fs::path dir = scratch("jobs");
  const auto reg = ObjectiveRegistry::with_builtins();
  emit_csv(run_experiment(small_config(), reg, 1), dir / "a.csv");
  emit_csv(run_experiment(small_config(), reg, 4), dir / "b.csv");
  emit_csv(run_experiment(small_config(), reg, 1), dir / "c.csv");
  EXPECT_EQ(slurp(dir / "a.csv"), slurp(dir / "b.csv"));
  EXPECT_EQ(slurp(dir / "a.csv"), slurp(dir / "c.csv"));
}

TEST(Csv, HeaderRoundTripAndProvenance) {
  const fs::path dir = scratch("csv");
  const RegretTable t = run_experiment(small_config(), ObjectiveRegistry::with_builtins());
  emit_csv(t, dir / "runs.csv");
  emit_summary_csv(t, dir / "summary.csv");
  const std::string text = slurp(dir / "runs.csv");
  EXPECT_NE(text.find("# config: "), std::string::npos);
  EXPECT_NE(text.find("\"beta\":12.0"), std::string::npos);
  const auto lines = data_lines(text);
  ASSERT_EQ(lines.size(), 1u + 4u * 3u);
  EXPECT_EQ(lines[0],
            "objective,functional,tau,method,budget,replication,seed,regret_raw,"
            "regret_clamped,recommended_x0,depth");
  std::size_t row = 0;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto cells = split_csv(lines[i]);
    ASSERT_EQ(cells.size(), 11u);
    const auto& rec = t.rows[(i - 1) / 3].replications[(i - 1) % 3];
    EXPECT_EQ(std::strtod(cells[7].c_str(), nullptr), rec.regret_raw);
    EXPECT_EQ(std::strtod(cells[9].c_str(), nullptr), rec.recommended_x[0]);
    EXPECT_EQ(std::stoi(cells[10]), rec.depth);
    ++row;
  }
  EXPECT_EQ(row, 12u);
  const auto summary = data_lines(slurp(dir / "summary.csv"));
  ASSERT_EQ(summary.size(), 5u);
  EXPECT_EQ(summary[0], "method,budget,mean_regret,stderr,n_reps");
  const auto first = split_csv(summary[1]);
  EXPECT_EQ(std::strtod(first[2].c_str(), nullptr), t.rows[0].mean_regret);
  EXPECT_EQ(first[4], "3");
}

TEST(Csv, EmptyTableIsHeaderOnly) {
  const fs::path dir = scratch("empty");
  emit_csv(RegretTable{}, dir / "runs.csv");
  EXPECT_EQ(slurp(dir / "runs.csv"),
            "objective,functional,tau,method,budget,replication,seed,regret_raw,"
            "regret_clamped,recommended_x0,depth\n");
  EXPECT_THROW(emit_csv(RegretTable{}, dir / "runs.csv" / "x.csv"), std::runtime_error);
}

TEST(Csv, SeventeenDigits) {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 123456.789, 0.0}) {
    EXPECT_EQ(std::strtod(format_real(v).c_str(), nullptr), v);
  }
}

TEST(Plot, Structure) {
  const fs::path dir = scratch("plot");
  RegretTable t;
  t.objective = "phi1";
  for (const char* m : {"kl", "hoeffding"}) {
    for (int b = 1; b <= 5; ++b) {
      RegretRow row;
      row.method = m;
      row.budget = 100 * b;
      row.mean_regret = b == 5 ? 0.0 : 0.1 / b;
      t.rows.push_back(row);
    }
  }
  emit_plot(t, dir / "regret.svg");
  const std::string svg = slurp(dir / "regret.svg");
  EXPECT_EQ(svg.rfind("<?xml", 0), 0u);
  EXPECT_NE(svg.find("</svg>\n"), std::string::npos);
  const std::regex poly("<polyline data-method=\"([a-z]+)\"[^>]*points=\"([^\"]*)\"/>");
  int count = 0;
  for (auto it = std::sregex_iterator(svg.begin(), svg.end(), poly); it != std::sregex_iterator();
       ++it) {
    ++count;
    std::istringstream pts((*it)[2].str());
    int vertices = 0;
    for (std::string p; pts >> p;) ++vertices;
    EXPECT_EQ(vertices, 5);
  }
  EXPECT_EQ(count, 2);
  // Zero regret sits on the 1e-8 floor, which is the lowest grid line.
  EXPECT_NE(svg.find(">1e-8</text>"), std::string::npos);
  emit_plot(RegretTable{}, dir / "empty.svg");
  EXPECT_NE(slurp(dir / "empty.svg").find("</svg>"), std::string::npos);
}

TEST(Cli, TheoryHandCheckedCase) {
  std::string out;
  EXPECT_EQ(cli({"theory", "--theorem", "5", "--d", "0", "--C", "1", "--K", "1", "--kappa", "1",
                 "--alpha", "1", "--rho", "0.5", "--beta", "1", "--gamma", "1", "--T", "1000",
                 "--eta", "0.1"},
                &out),
            0);
  EXPECT_NE(out.find("c1=4\n"), std::string::npos);
  EXPECT_NE(out.find("bound=" + format_real(4.0 * std::log(2e6 / 0.1) / 1000.0)),
            std::string::npos);
  EXPECT_EQ(cli({"theory", "--theorem", "14", "--tau", "0.9", "--K", "1", "--rho", "0.5"}, &out),
            0);
  EXPECT_NE(out.find("c3="), std::string::npos);
  EXPECT_EQ(cli({"theory", "--theorem", "6"}), 2);
  EXPECT_EQ(cli({"theory", "--rho", "1"}), 2);
}

TEST(Cli, OptimumAndBounds) {
  std::string out;
  EXPECT_EQ(cli({"optimum", "--objective", "phi1", "--functional", "quantile", "--tau", "0.1",
                 "--resolution", "2001"},
                &out),
            0);
  const GridOptimum g = grid_optimum(Phi1Objective(), 0.1, Functional::kQuantile, 2001);
  EXPECT_NE(out.find("g* = " + format_real(g.g)), std::string::npos);
  EXPECT_EQ(cli({"optimum", "--objective", "phi2", "--functional", "cvar"}), 2);
  EXPECT_EQ(cli({"optimum", "--objective", "nope"}), 2);

  const fs::path dir = scratch("cli_bounds");
  std::ofstream(dir / "s.txt") << "0.1 0.2\n0.3,0.4\n";
  EXPECT_EQ(cli({"bounds", "--samples", (dir / "s.txt").string(), "--method", "brown", "--tau",
                 "0.5", "--T", "100"},
                &out),
            0);
  EXPECT_NE(out.find("estimate = " + format_real(-0.35)), std::string::npos);
  EXPECT_EQ(cli({"bounds", "--samples", (dir / "missing.txt").string(), "--method", "kl"}), 2);
  EXPECT_EQ(cli({"bounds", "--samples", (dir / "s.txt").string(), "--method", "nope"}), 2);
  std::ofstream(dir / "bad.txt") << "0.1 abc\n";
  EXPECT_EQ(cli({"bounds", "--samples", (dir / "bad.txt").string(), "--method", "kl"}), 2);
}

TEST(Cli, RunWritesOutputsAndHonoursSeedPrecedence) {
  const fs::path dir = scratch("cli_run");
  nlohmann::json cfg = config_to_json(small_config());
  cfg["output_dir"] = (dir / "from_file").string();
  cfg["base_seed"] = 5;
  std::ofstream(dir / "exp.json") << cfg.dump(2);

  std::string out;
  EXPECT_EQ(cli({"run", "--config", (dir / "exp.json").string()}, &out), 0);
  for (const char* f : {"runs.csv", "summary.csv", "regret.svg"}) {
    EXPECT_TRUE(fs::exists(dir / "from_file" / f)) << f;
  }
  EXPECT_NE(slurp(dir / "from_file" / "runs.csv").find(",kl,100,1,6,"), std::string::npos);

  // Flag beats file.
  EXPECT_EQ(cli({"run", "--config", (dir / "exp.json").string(), "--seed", "40", "--output-dir",
                 (dir / "flag").string()}),
            0);
  EXPECT_NE(slurp(dir / "flag" / "runs.csv").find(",kl,100,1,41,"), std::string::npos);

  // Environment only applies without a file or flag seed.
  ::setenv("STOROO_SEED", "70", 1);
  cfg.erase("base_seed");
  std::ofstream(dir / "noseed.json") << cfg.dump();
  EXPECT_EQ(cli({"run", "--config", (dir / "noseed.json").string(), "--output-dir",
                 (dir / "env").string()}),
            0);
  EXPECT_NE(slurp(dir / "env" / "runs.csv").find(",kl,100,1,71,"), std::string::npos);
  EXPECT_EQ(cli({"run", "--config", (dir / "exp.json").string(), "--output-dir",
                 (dir / "file_over_env").string()}),
            0);
  EXPECT_NE(slurp(dir / "file_over_env" / "runs.csv").find(",kl,100,1,6,"), std::string::npos);
  ::setenv("STOROO_SEED", "x", 1);
  EXPECT_EQ(cli({"run", "--config", (dir / "noseed.json").string()}), 2);
  ::unsetenv("STOROO_SEED");
}

TEST(Cli, MalformedInputExitsTwo) {
  std::string err;
  EXPECT_EQ(cli({}, nullptr, &err), 2);
  EXPECT_FALSE(err.empty());
  EXPECT_EQ(cli({"frobnicate"}), 2);
  EXPECT_EQ(cli({"run", "--tau"}), 2);
  EXPECT_EQ(cli({"run", "--budgets", "500", "100"}), 2);
  EXPECT_EQ(cli({"run", "--method", "kl-o"}), 2);
  EXPECT_EQ(cli({"run", "--config", "/nonexistent/exp.json"}), 2);
  const fs::path dir = scratch("cli_bad");
  std::ofstream(dir / "bad.json") << "{\"tau\": 0.5,";
  EXPECT_EQ(cli({"run", "--config", (dir / "bad.json").string()}), 2);
  std::ofstream(dir / "unknown.json") << "{\"colour\": \"red\"}";
  EXPECT_EQ(cli({"run", "--config", (dir / "unknown.json").string()}), 2);
  std::string out;
  EXPECT_EQ(cli({"--help"}, &out), 0);
  EXPECT_NE(out.find("run"), std::string::npos);
}

TEST(Cli, BinaryExitCodes) {
  const std::string bin = STOROO_CLI_PATH;
  EXPECT_EQ(std::system((bin + " > /dev/null 2>&1").c_str()) >> 8, 2);
  EXPECT_EQ(std::system((bin + " theory > /dev/null 2>&1").c_str()) >> 8, 0);
  EXPECT_EQ(std::system((bin + " run --replications 0 > /dev/null 2>&1").c_str()) >> 8, 2);
}
