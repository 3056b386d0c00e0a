// Copyright 2026 The cmgames Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cmg/config.hpp"

#include <json.hpp>
#include <string>
#include <vector>

namespace cmg {

namespace {

using nlohmann::json;

std::vector<double> to_doubles(const json& node, const std::string& field) {
  if (!node.is_array()) throw SpecError("field '" + field + "' must be a list");
  std::vector<double> values;
  values.reserve(node.size());
  for (const json& item : node) {
    if (!item.is_number()) {
      throw SpecError("field '" + field + "' must contain numbers");
    }
    values.push_back(item.get<double>());
  }
  return values;
}

Vector to_vector(const json& node, const std::string& field) {
  const std::vector<double> values = to_doubles(node, field);
  Vector v(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) v[i] = values[i];
  return v;
}

Matrix to_matrix(const json& node, int rows, int cols,
                 const std::string& field) {
  const std::vector<double> values = to_doubles(node, field);
  if (static_cast<int>(values.size()) != rows * cols) {
    throw SpecError("field '" + field + "' has " +
                    std::to_string(values.size()) + " entries, expected " +
                    std::to_string(rows * cols));
  }
  Matrix m(rows, cols);
  for (int s = 0; s < rows; ++s) {
    for (int a = 0; a < cols; ++a) m(s, a) = values[s * cols + a];
  }
  return m;
}

json matrix_to_json(const Matrix& m) {
  std::vector<double> values;
  values.reserve(m.size());
  for (int s = 0; s < m.rows(); ++s) {
    for (int a = 0; a < m.cols(); ++a) values.push_back(m(s, a));
  }
  return json(values);
}

const json& require(const json& node, const std::string& field) {
  const auto it = node.find(field);
  if (it == node.end()) throw SpecError("missing field '" + field + "'");
  return *it;
}

UtilityTerm parse_term(const json& node, const GameSpec& spec, int player,
                       const std::vector<double>* player_reward) {
  const std::string kind = require(node, "kind").get<std::string>();
  const json params = node.value("params", json::object());
  if (kind == "linear_reward") {
    LinearReward term;
    if (params.contains("reward")) {
      term.reward = to_doubles(params["reward"], "reward");
    } else if (player_reward != nullptr) {
      term.reward = *player_reward;
    } else {
      throw SpecError(
          "linear_reward for player " + std::to_string(player) +
          " needs an inline reward or a top-level 'reward' tensor");
    }
    return term;
  }
  if (kind == "entropy") {
    EntropyBonus term;
    term.tau = params.value("tau", 1.0);
    term.annealed = params.value("annealed", true);
    return term;
  }
  if (kind == "kl_ref") {
    KLPenalty term;
    term.tau = params.value("tau", 1.0);
    term.annealed = params.value("annealed", true);
    term.mu_ref = to_matrix(require(params, "mu_ref"), spec.n_states,
                            spec.action_counts[player], "mu_ref");
    return term;
  }
  if (kind == "fairness_pair") {
    FairnessPenalty term;
    term.s_plus = require(params, "s_plus").get<int>();
    term.s_minus = require(params, "s_minus").get<int>();
    term.weight = params.value("weight", 1.0);
    return term;
  }
  if (kind == "hinge") {
    HingePenalty term;
    term.state = require(params, "state").get<int>();
    term.action = require(params, "action").get<int>();
    term.threshold = require(params, "threshold").get<double>();
    term.weight = require(params, "weight").get<double>();
    return term;
  }
  if (kind == "infnorm_safety") {
    InfNormSafety term;
    term.target_action = to_vector(require(params, "t_a"), "t_a");
    term.target_state = to_vector(require(params, "t_s"), "t_s");
    term.radius_action = require(params, "r_a").get<double>();
    term.radius_state = require(params, "r_s").get<double>();
    return term;
  }
  throw SpecError("unknown utility term tag '" + kind + "'");
}

json term_to_json(const UtilityTerm& term, const GameSpec& spec, int player,
                  const std::vector<std::vector<double>>& player_rewards) {
  json node;
  json params = json::object();
  if (const auto* lin = std::get_if<LinearReward>(&term)) {
    node["kind"] = "linear_reward";
    // Rewards matching the top-level tensor are not repeated inline.
    if (player_rewards.empty() || player_rewards[player] != lin->reward) {
      params["reward"] = json(lin->reward);
    }
  } else if (const auto* ent = std::get_if<EntropyBonus>(&term)) {
    node["kind"] = "entropy";
    params["tau"] = ent->tau;
    params["annealed"] = ent->annealed;
  } else if (const auto* kl = std::get_if<KLPenalty>(&term)) {
    node["kind"] = "kl_ref";
    params["tau"] = kl->tau;
    params["annealed"] = kl->annealed;
    params["mu_ref"] = matrix_to_json(kl->mu_ref);
  } else if (const auto* fair = std::get_if<FairnessPenalty>(&term)) {
    node["kind"] = "fairness_pair";
    params["s_plus"] = fair->s_plus;
    params["s_minus"] = fair->s_minus;
    params["weight"] = fair->weight;
  } else if (const auto* hinge = std::get_if<HingePenalty>(&term)) {
    node["kind"] = "hinge";
    params["state"] = hinge->state;
    params["action"] = hinge->action;
    params["threshold"] = hinge->threshold;
    params["weight"] = hinge->weight;
  } else if (const auto* inf = std::get_if<InfNormSafety>(&term)) {
    node["kind"] = "infnorm_safety";
    params["t_a"] = std::vector<double>(
        inf->target_action.data(),
        inf->target_action.data() + inf->target_action.size());
    params["t_s"] = std::vector<double>(
        inf->target_state.data(),
        inf->target_state.data() + inf->target_state.size());
    params["r_a"] = inf->radius_action;
    params["r_s"] = inf->radius_state;
  }
  node["params"] = params;
  (void)spec;
  return node;
}

}  // namespace

LoadedGame load_spec(const std::string& document) {
  json root;
  try {
    root = json::parse(document);
  } catch (const json::parse_error& error) {
    throw SpecError(std::string("config parse error: ") + error.what());
  }
  if (!root.is_object()) throw SpecError("config must be a JSON object");

  LoadedGame game;
  GameSpec& spec = game.spec;
  spec.n_players = require(root, "players").get<int>();
  spec.n_states = require(root, "states").get<int>();
  const json& actions = require(root, "actions");
  if (!actions.is_array()) throw SpecError("field 'actions' must be a list");
  for (const json& a : actions) spec.action_counts.push_back(a.get<int>());
  spec.gamma = require(root, "gamma").get<double>();
  spec.mu0 = to_vector(require(root, "mu0"), "mu0");
  spec.transition = to_doubles(require(root, "transition"), "transition");

  const ValidationReport report = validate_spec(spec);
  if (!report.ok()) {
    throw SpecError("config failed validation:\n" + report.to_string());
  }

  // Optional shared reward tensor, [player, s, a_1..a_n].
  std::vector<std::vector<double>> player_rewards;
  if (root.contains("reward")) {
    const std::vector<double> flat = to_doubles(root["reward"], "reward");
    const std::size_t per_player =
        static_cast<std::size_t>(spec.n_states) * spec.joint_action_count();
    if (flat.size() != per_player * spec.n_players) {
      throw SpecError("field 'reward' has " + std::to_string(flat.size()) +
                      " entries, expected " +
                      std::to_string(per_player * spec.n_players));
    }
    for (int i = 0; i < spec.n_players; ++i) {
      player_rewards.emplace_back(flat.begin() + i * per_player,
                                  flat.begin() + (i + 1) * per_player);
    }
  }

  const json& utilities = require(root, "utilities");
  if (!utilities.is_array() ||
      static_cast<int>(utilities.size()) != spec.n_players) {
    throw SpecError("field 'utilities' must list one term set per player");
  }
  for (int i = 0; i < spec.n_players; ++i) {
    std::vector<UtilityTerm> terms;
    for (const json& node : utilities[i]) {
      terms.push_back(parse_term(
          node, spec, i,
          player_rewards.empty() ? nullptr : &player_rewards[i]));
    }
    game.utilities.player_terms.push_back(std::move(terms));
  }
  check_utilities(spec, game.utilities);
  return game;
}

std::string save_spec(const GameSpec& spec, const UtilitySpec& utilities) {
  json root;
  root["players"] = spec.n_players;
  root["states"] = spec.n_states;
  root["actions"] = spec.action_counts;
  root["gamma"] = spec.gamma;
  root["mu0"] =
      std::vector<double>(spec.mu0.data(), spec.mu0.data() + spec.mu0.size());
  root["transition"] = spec.transition;

  // Emit a shared reward tensor when every player has exactly one linear
  // term; such configs reload without inline duplicates.
  std::vector<std::vector<double>> player_rewards;
  bool shared_reward = utilities.n_players() == spec.n_players;
  for (int i = 0; shared_reward && i < spec.n_players; ++i) {
    const std::vector<double>* reward = nullptr;
    int linear_terms = 0;
    for (const UtilityTerm& term : utilities.player_terms[i]) {
      if (const auto* lin = std::get_if<LinearReward>(&term)) {
        ++linear_terms;
        reward = &lin->reward;
      }
    }
    if (linear_terms != 1) {
      shared_reward = false;
    } else {
      player_rewards.push_back(*reward);
    }
  }
  if (!shared_reward) player_rewards.clear();
  if (shared_reward) {
    std::vector<double> flat;
    for (const std::vector<double>& reward : player_rewards) {
      flat.insert(flat.end(), reward.begin(), reward.end());
    }
    root["reward"] = flat;
  }

  json terms_json = json::array();
  for (int i = 0; i < utilities.n_players(); ++i) {
    json player_terms = json::array();
    for (const UtilityTerm& term : utilities.player_terms[i]) {
      player_terms.push_back(term_to_json(term, spec, i, player_rewards));
    }
    terms_json.push_back(player_terms);
  }
  root["utilities"] = terms_json;
  return root.dump(2);
}

}  // namespace cmg
