#include <sys/wait.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "ibandit/eval.hpp"
#include "ibandit/harness.hpp"

using namespace ibandit;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("ibandit_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(IBANDIT_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::size_t count_lines(const std::string& s) { return std::count(s.begin(), s.end(), '\n'); }

ExperimentConfig quiet(ExperimentConfig c) {
  c.timing = false;
  c.threads = 1;
  return c;
}

}  // namespace

TEST_CASE("evaluation cadence") {
  EvalCadence geom;
  const auto c = geom.checkpoints(1000);
  CHECK(c.front() == 1);
  CHECK(c.back() == 1000);
  CHECK(std::is_sorted(c.begin(), c.end()));
  CHECK(std::adjacent_find(c.begin(), c.end()) == c.end());
  CHECK(std::count(c.begin(), c.end(), 10) == 1);
  CHECK(std::count(c.begin(), c.end(), 100) == 1);
  CHECK(EvalCadence::parse("250").checkpoints(1000) == std::vector<std::int64_t>{250, 500, 750, 1000});
  CHECK(EvalCadence::parse("300").checkpoints(1000) ==
        std::vector<std::int64_t>{300, 600, 900, 1000});
  CHECK(EvalCadence::parse("geom:1").checkpoints(1000) ==
        std::vector<std::int64_t>{1, 10, 100, 1000});
  CHECK(EvalCadence::parse("geom").per_decade == 20);
  CHECK(EvalCadence::parse(EvalCadence::parse("geom:7").to_string()).per_decade == 7);
  CHECK(EvalCadence{}.checkpoints(1) == std::vector<std::int64_t>{1});
  CHECK_THROWS_AS(EvalCadence::parse("often"), ConfigError);
  CHECK_THROWS_AS(EvalCadence::parse("0"), ConfigError);
}

TEST_CASE("configuration validation and JSON round trip") {
  ExperimentConfig c;
  CHECK_NOTHROW(c.validate());
  ExperimentConfig bad = c;
  bad.iters = 0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = c;
  bad.seeds.clear();
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = c;
  bad.k = 0.0;
  try {
    bad.validate();
    FAIL("expected a ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.field() == "k");
  }
  bad = c;
  bad.eps = 1.5;
  CHECK_THROWS_AS(bad.validate(), ConfigError);

  c.k = 0.5;
  c.variant = RolloutVariant::kUpfront;
  c.seeds = {3, 1};
  c.cadence = EvalCadence::parse("50");
  const ExperimentConfig back = ExperimentConfig::from_json(c.to_json(), ExperimentConfig{});
  CHECK(back.to_json() == c.to_json());
  CHECK(config_hash(back) == config_hash(c));
  ExperimentConfig other = c;
  other.k = 1.0;
  CHECK(config_hash(other) != config_hash(c));

  try {
    ExperimentConfig::from_json(nlohmann::json{{"kk", 1}}, ExperimentConfig{});
    FAIL("expected a ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.field() == "config.kk");
  }
  CHECK(parse_seeds("3") == std::vector<std::uint64_t>{0, 1, 2});
  CHECK(parse_seeds("3,7,11") == std::vector<std::uint64_t>{3, 7, 11});
  CHECK_THROWS_AS(parse_seeds("x"), ConfigError);
}

TEST_CASE("self-play on the trivial game writes one row per checkpoint") {
  ExperimentConfig c = quiet({});
  c.game = "trivial";
  c.iters = 10;
  c.seeds = {0, 1};
  c.cadence = EvalCadence::parse("1");
  const auto rows = run_selfplay(c);
  CHECK(rows.size() == 20);
  const std::string csv = format_curve_csv(rows);
  CHECK(csv.substr(0, csv.find('\n')) == kCurveHeader);
  CHECK(count_lines(csv) == 21);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i].exploitability >= 0.0);
    CHECK(rows[i].seed == (i < 10 ? 0u : 1u));
    CHECK(rows[i].wallclock_ms == 0.0);
    if (i % 10 != 0) CHECK(rows[i].iter == rows[i - 1].iter + 1);
  }
}

TEST_CASE("runs are deterministic and seeds are isolated") {
  ExperimentConfig c = quiet({});
  c.iters = 2000;
  c.k = 1.0;
  c.seeds = {4, 9, 2};
  const std::string first = format_curve_csv(run_selfplay(c));
  CHECK(format_curve_csv(run_selfplay(c)) == first);
  c.threads = 3;
  CHECK(format_curve_csv(run_selfplay(c)) == first);

  ExperimentConfig permuted = c;
  permuted.seeds = {2, 4, 9};
  const auto a = run_selfplay(c);
  const auto b = run_selfplay(permuted);
  REQUIRE(a.size() == b.size());
  auto key = [](const CurvePoint& p) { return std::make_pair(p.seed, p.iter); };
  auto sorted = [&](std::vector<CurvePoint> v) {
    std::sort(v.begin(), v.end(), [&](const auto& x, const auto& y) { return key(x) < key(y); });
    return format_curve_csv(v);
  };
  CHECK(sorted(a) == sorted(b));
}

TEST_CASE("evaluation checkpoints do not perturb learning") {
  ExperimentConfig c = quiet({});
  c.iters = 1000;
  c.k = 1.0;
  c.cadence = EvalCadence::parse("1");
  const auto dense = run_selfplay(c);
  c.cadence = EvalCadence::parse("geom:2");
  const auto sparse = run_selfplay(c);
  for (const CurvePoint& p : sparse) {
    const CurvePoint& q = dense[p.iter - 1];
    CHECK(q.iter == p.iter);
    CHECK(q.exploitability == p.exploitability);
    CHECK(q.regret_p1 == p.regret_p1);
  }
}

TEST_CASE("baselines run through the same driver") {
  for (const char* algo : {"mccfr", "cfr"}) {
    ExperimentConfig c = quiet({});
    c.algo = parse_algorithm(algo);
    c.iters = 3000;
    c.eps = 0.1;
    const auto rows = run_selfplay(c);
    CHECK(rows.back().iter == 3000);
    CHECK(rows.back().exploitability < rows.front().exploitability);
  }
}

TEST_CASE("learning against a fixed uniform opponent") {
  const GameTree kuhn = build_kuhn();
  const fs::path dir = scratch("vsfixed");
  const DecisionProblem& p2 = kuhn.problem(Player::kTwo);
  const BehavioralStrategy uniform = to_labeled(p2, uniform_behavioral(p2));
  const fs::path file = dir / "uniform_p2.json";
  write_file_atomic(file.string(), dump_strategy_json(uniform, kuhn, Player::kTwo));
  CHECK(load_strategy_json(slurp(file), kuhn, Player::kTwo) == uniform);

  ExperimentConfig c = quiet({});
  c.opponent = file.string();
  c.iters = 100000;
  c.k = 1.0;
  const auto rows = run_vs_fixed(c);
  CHECK(rows.back().iter == 100000);
  CHECK(rows.back().exploitability < 0.02);
  CHECK(std::isnan(rows.back().regret_p2));

  c.iters = 1;
  c.audit_mode = AuditMode::kSampled;
  const auto one = run_vs_fixed(c);
  REQUIRE(one.size() == 1);
  CHECK(one[0].iter == 1);
  CHECK(one[0].regret_p1 >= 0.0);

  c.opponent = (dir / "missing.json").string();
  CHECK_THROWS_AS(run_vs_fixed(c), ConfigError);
  CHECK_THROWS_AS(load_strategy_json(R"({"P2:J:b": {"fold": 1.0}})", kuhn, Player::kTwo),
                  std::exception);
  CHECK_THROWS_AS(load_strategy_json(dump_strategy_json(uniform, kuhn, Player::kTwo), kuhn,
                                     Player::kOne),
                  std::exception);
}

TEST_CASE("regret stays sublinear against an adversarial opponent") {
  ExperimentConfig c = quiet({});
  c.opponent = "adversarial";
  c.iters = 20000;
  c.k = 1.0;
  const auto rows = run_vs_fixed(c);
  std::vector<std::pair<double, double>> series;
  for (const CurvePoint& p : rows) {
    if (p.iter >= 200) series.emplace_back(static_cast<double>(p.iter), p.regret_p1);
  }
  CHECK(loglog_slope(series) < 0.85);
}

TEST_CASE("sweep writes one file per cell and a manifest") {
  const fs::path dir = scratch("sweep");
  const nlohmann::json grid = {
      {"base", {{"game", "kuhn"}, {"iters", 200}, {"timing", false}, {"threads", 1}}},
      {"grid",
       {{"k", {0.5, 1, 10, 20}},
        {"exploration", {"uniform", "balanced"}},
        {"variant", {"on-path", "upfront"}}}}};
  const nlohmann::json manifest = run_sweep(grid, dir.string());
  REQUIRE(manifest["cells"].size() == 16);
  std::size_t csvs = 0;
  for (const auto& entry : fs::directory_iterator(dir)) csvs += entry.path().extension() == ".csv";
  CHECK(csvs == 16);
  for (const auto& cell : manifest["cells"]) {
    CHECK(cell["status"] == "ok");
    CHECK(fs::exists(dir / cell["file"].get<std::string>()));
  }
  CHECK(nlohmann::json::parse(slurp(dir / "manifest.json")) == manifest);

  const nlohmann::json again = run_sweep(grid, scratch("sweep2").string());
  for (std::size_t i = 0; i < 16; ++i) {
    CHECK(again["cells"][i]["config_hash"] == manifest["cells"][i]["config_hash"]);
  }

  CHECK_THROWS_AS(run_sweep(nlohmann::json{{"grid", nlohmann::json::object()}}, dir.string()),
                  ConfigError);
  CHECK_THROWS_AS(run_sweep(nlohmann::json{{"grid", {{"k", nlohmann::json::array()}}}},
                            dir.string()),
                  ConfigError);

  const nlohmann::json partial = {{"base", {{"iters", 20}, {"timing", false}}},
                                  {"grid", {{"game", {"trivial", "no_such_game.json"}}}}};
  const nlohmann::json m = run_sweep(partial, scratch("sweep3").string());
  REQUIRE(m["cells"].size() == 2);
  CHECK(m["cells"][0]["status"] == "ok");
  CHECK(m["cells"][1]["status"] == "failed");
}

TEST_CASE("command-line exit codes") {
  const fs::path dir = scratch("cli");
  const std::string out = (dir / "curve.csv").string();
  CHECK(run_cli("selfplay --game trivial --iters 5 --no-timing --out " + out) == 0);
  const std::string csv = slurp(out);
  CHECK(csv.substr(0, csv.find('\n')) == kCurveHeader);
  CHECK(run_cli("selfplay --game no_such_game.json --iters 5") == 2);
  CHECK(run_cli("selfplay --iters 0") == 2);
  CHECK(run_cli("selfplay --bogus-flag") == 2);
  CHECK(run_cli("selfplay --game kuhn --variant sideways") == 2);
  CHECK(run_cli("--help") == 0);
  const std::string game = (dir / "kuhn.json").string();
  CHECK(run_cli("export-game --game kuhn --out " + game) == 0);
  CHECK(load_game_file(game).terminals().size() == 30);
  CHECK(run_cli("selfplay --game " + game + " --iters 20 --no-timing --out " + out) == 0);
}
