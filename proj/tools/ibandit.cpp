// Command-line driver: self-play, fixed-opponent runs, sweeps and game export.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "ibandit/game.hpp"
#include "ibandit/harness.hpp"
#include "json.hpp"

namespace {

using ibandit::ConfigError;
using ibandit::ExperimentConfig;

struct RunFlags {
  std::string game = "kuhn";
  std::string algo = "ib";
  std::string variant = "on-path";
  double k = 10.0;
  std::string exploration = "uniform";
  double eps = 0.6;
  std::string rm = "rm+";
  std::int64_t iters = 1000;
  std::string seeds = "1";
  std::string eval_every = "geom";
  std::string out;
  std::string audit = "on";
  std::string audit_mode = "sampled";
  bool no_timing = false;
  int threads = 0;
  std::string opponent;
  int player = 1;
};

void add_run_flags(CLI::App* cmd, RunFlags& f) {
  cmd->add_option("--game", f.game, "kuhn, leduc, trivial or a game JSON path");
  cmd->add_option("--algo", f.algo, "ib, mccfr or cfr");
  cmd->add_option("--variant", f.variant, "on-path, upfront or alternating");
  cmd->add_option("--k", f.k, "exploration schedule constant");
  cmd->add_option("--exploration", f.exploration, "uniform or balanced");
  cmd->add_option("--eps", f.eps, "online MCCFR exploration");
  cmd->add_option("--rm", f.rm, "rm or rm+");
  cmd->add_option("--iters", f.iters, "iterations T");
  cmd->add_option("--seeds", f.seeds, "seed count or comma-separated list");
  cmd->add_option("--eval-every", f.eval_every, "geom, geom:<n> or a fixed stride");
  cmd->add_option("--out", f.out, "output CSV path (stdout when omitted)");
  cmd->add_option("--audit", f.audit, "on or off");
  cmd->add_option("--audit-mode", f.audit_mode, "sampled or expected");
  cmd->add_flag("--no-timing", f.no_timing, "write 0 in wallclock_ms");
  cmd->add_option("--threads", f.threads, "worker threads, 0 for all cores");
}

ExperimentConfig to_config(const RunFlags& f) {
  nlohmann::json j;
  j["game"] = f.game;
  j["algo"] = f.algo;
  j["variant"] = f.variant;
  j["k"] = f.k;
  j["exploration"] = f.exploration;
  j["eps"] = f.eps;
  j["rm"] = f.rm;
  j["iters"] = f.iters;
  j["seeds"] = f.seeds;
  j["eval_every"] = f.eval_every;
  if (f.audit != "on" && f.audit != "off") throw ConfigError("audit", "expected on or off");
  j["audit"] = f.audit == "on";
  j["audit_mode"] = f.audit_mode;
  j["timing"] = !f.no_timing;
  if (!f.opponent.empty()) {
    j["opponent"] = f.opponent;
    j["player"] = f.player;
  }
  ExperimentConfig c = ExperimentConfig::from_json(j, ExperimentConfig{}, "flags");
  c.threads = f.threads;
  c.validate();
  return c;
}

void emit(const std::string& out, const std::string& text) {
  if (out.empty()) {
    std::cout << text;
  } else {
    ibandit::write_file_atomic(out, text);
  }
}

std::string read_file(const std::string& path, const std::string& field) {
  std::ifstream in(path);
  if (!in) throw ConfigError(field, "cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Regret minimization under interactive bandit feedback"};
  app.require_subcommand(1);

  RunFlags selfplay;
  auto* cmd_selfplay = app.add_subcommand("selfplay", "two learning agents play each other");
  add_run_flags(cmd_selfplay, selfplay);

  RunFlags vs_fixed;
  auto* cmd_vs = app.add_subcommand("vs-fixed", "one learning agent against a fixed opponent");
  add_run_flags(cmd_vs, vs_fixed);
  cmd_vs->add_option("--opponent", vs_fixed.opponent, "strategy JSON path or 'adversarial'")
      ->required();
  cmd_vs->add_option("--player", vs_fixed.player, "seat of the learning agent (1 or 2)");

  std::string grid_path;
  std::string out_dir;
  auto* cmd_sweep = app.add_subcommand("sweep", "run every cell of a parameter grid");
  cmd_sweep->add_option("--grid", grid_path, "grid JSON")->required();
  cmd_sweep->add_option("--out-dir", out_dir, "output directory")->required();

  std::string export_game = "kuhn";
  std::string export_out;
  auto* cmd_export = app.add_subcommand("export-game", "write a game as JSON");
  cmd_export->add_option("--game", export_game, "kuhn, leduc, trivial or a game JSON path");
  cmd_export->add_option("--out", export_out, "output path (stdout when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*cmd_selfplay) {
      const ExperimentConfig c = to_config(selfplay);
      emit(selfplay.out, ibandit::format_curve_csv(ibandit::run_selfplay(c)));
    } else if (*cmd_vs) {
      const ExperimentConfig c = to_config(vs_fixed);
      emit(vs_fixed.out, ibandit::format_curve_csv(ibandit::run_vs_fixed(c)));
    } else if (*cmd_sweep) {
      nlohmann::json grid;
      try {
        grid = nlohmann::json::parse(read_file(grid_path, "grid"));
      } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("grid", e.what());
      }
      const nlohmann::json manifest = ibandit::run_sweep(grid, out_dir);
      int failed = 0;
      for (const auto& cell : manifest["cells"]) failed += cell["status"] != "ok";
      if (failed > 0) {
        std::cerr << failed << " of " << manifest["cells"].size() << " cells failed\n";
        return 1;
      }
    } else if (*cmd_export) {
      ibandit::GameTree game = [&] {
        try {
          return ibandit::load_game(export_game);
        } catch (const ibandit::GameError& e) {
          throw ConfigError("game", e.what());
        }
      }();
      emit(export_out, ibandit::dump_game_json(game));
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
