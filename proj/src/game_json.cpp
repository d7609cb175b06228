#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "ibandit/game.hpp"
#include "json.hpp"

namespace ibandit {

namespace {

using nlohmann::json;

const json& require(const json& obj, const char* key, const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) throw GameError(path + "." + key, "missing field");
  return *it;
}

std::string as_string(const json& v, const std::string& path) {
  if (!v.is_string()) throw GameError(path, "expected a string");
  return v.get<std::string>();
}

double as_number(const json& v, const std::string& path) {
  if (!v.is_number()) throw GameError(path, "expected a number");
  return v.get<double>();
}

GameNode::Kind parse_kind(const std::string& s, const std::string& path) {
  if (s == "decision") return GameNode::Kind::kDecision;
  if (s == "chance") return GameNode::Kind::kChance;
  if (s == "terminal") return GameNode::Kind::kTerminal;
  throw GameError(path, "unknown node kind '" + s + "'");
}

}  // namespace

GameTree load_game_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw GameError("$", std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw GameError("$", "expected an object");
  if (auto it = doc.find("players"); it != doc.end() && *it != 2) {
    throw GameError("players", "only two-player games are supported");
  }
  const std::string root_id = as_string(require(doc, "root", "$"), "root");
  const json& nodes = require(doc, "nodes", "$");
  if (!nodes.is_object() || nodes.empty()) throw GameError("nodes", "expected a non-empty object");

  std::unordered_map<std::string, NodeIndex> ids;
  for (auto it = nodes.begin(); it != nodes.end(); ++it) {
    ids.emplace(it.key(), static_cast<NodeIndex>(ids.size()));
  }
  auto resolve = [&](const json& v, const std::string& path) {
    const std::string id = as_string(v, path);
    auto it = ids.find(id);
    if (it == ids.end()) throw GameError(path, "dangling child id '" + id + "'");
    return it->second;
  };

  std::vector<GameNode> out(ids.size());
  for (auto it = nodes.begin(); it != nodes.end(); ++it) {
    const std::string path = "nodes." + it.key();
    const json& spec = it.value();
    if (!spec.is_object()) throw GameError(path, "expected an object");
    GameNode& n = out[ids.at(it.key())];
    n.id = it.key();
    n.kind = parse_kind(as_string(require(spec, "kind", path), path + ".kind"), path + ".kind");
    switch (n.kind) {
      case GameNode::Kind::kDecision: {
        const json& player = require(spec, "player", path);
        if (!player.is_number_integer() || (player != 1 && player != 2)) {
          throw GameError(path + ".player", "player must be 1 or 2");
        }
        n.player = player_from_number(player.get<int>());
        n.infoset = as_string(require(spec, "infoset", path), path + ".infoset");
        const json& actions = require(spec, "actions", path);
        if (!actions.is_array()) throw GameError(path + ".actions", "expected an array");
        for (std::size_t a = 0; a < actions.size(); ++a) {
          const std::string ap = path + ".actions[" + std::to_string(a) + "]";
          n.labels.push_back(as_string(require(actions[a], "label", ap), ap + ".label"));
          n.children.push_back(resolve(require(actions[a], "child", ap), ap + ".child"));
        }
        break;
      }
      case GameNode::Kind::kChance: {
        const json& outcomes = require(spec, "outcomes", path);
        if (!outcomes.is_array()) throw GameError(path + ".outcomes", "expected an array");
        for (std::size_t o = 0; o < outcomes.size(); ++o) {
          const std::string op = path + ".outcomes[" + std::to_string(o) + "]";
          n.labels.push_back(as_string(require(outcomes[o], "label", op), op + ".label"));
          n.probs.push_back(as_number(require(outcomes[o], "prob", op), op + ".prob"));
          n.children.push_back(resolve(require(outcomes[o], "child", op), op + ".child"));
        }
        break;
      }
      case GameNode::Kind::kTerminal: {
        n.payoff_p1 = as_number(require(spec, "payoff_p1", path), path + ".payoff_p1");
        if (auto p2 = spec.find("payoff_p2"); p2 != spec.end()) {
          const double v = as_number(*p2, path + ".payoff_p2");
          if (v != -n.payoff_p1) {
            throw GameError(path + ".payoff_p2", "payoffs are not zero-sum");
          }
        }
        break;
      }
    }
  }
  auto root = ids.find(root_id);
  if (root == ids.end()) throw GameError("root", "unknown root id '" + root_id + "'");
  return GameTree::create(std::move(out), root->second, "json");
}

GameTree load_game_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open game file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return load_game_json(buf.str());
}

std::string dump_game_json(const GameTree& game) {
  nlohmann::ordered_json nodes = nlohmann::ordered_json::object();
  for (const GameNode& n : game.nodes()) {
    nlohmann::ordered_json spec;
    switch (n.kind) {
      case GameNode::Kind::kDecision:
        spec["kind"] = "decision";
        spec["player"] = number(n.player);
        spec["infoset"] = n.infoset;
        spec["actions"] = nlohmann::ordered_json::array();
        for (std::size_t a = 0; a < n.children.size(); ++a) {
          spec["actions"].push_back(
              {{"label", n.labels[a]}, {"child", game.node(n.children[a]).id}});
        }
        break;
      case GameNode::Kind::kChance:
        spec["kind"] = "chance";
        spec["outcomes"] = nlohmann::ordered_json::array();
        for (std::size_t o = 0; o < n.children.size(); ++o) {
          spec["outcomes"].push_back({{"label", n.labels[o]},
                                      {"prob", n.probs[o]},
                                      {"child", game.node(n.children[o]).id}});
        }
        break;
      case GameNode::Kind::kTerminal:
        spec["kind"] = "terminal";
        spec["payoff_p1"] = n.payoff_p1;
        break;
    }
    nodes[n.id] = std::move(spec);
  }
  nlohmann::ordered_json doc;
  doc["players"] = 2;
  doc["root"] = game.node(game.root()).id;
  doc["nodes"] = std::move(nodes);
  return doc.dump(2) + "\n";
}

}  // namespace ibandit
