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
//
// Batch experiment harness: solve a built-in domain or a config file,
// certify exploitability, and emit traces and equilibrium tables.

#include <CLI11.hpp>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "cmg/config.hpp"
#include "cmg/domains.hpp"
#include "cmg/exploitability.hpp"
#include "cmg/occupancy.hpp"
#include "cmg/solvers.hpp"

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitInvalidConfig = 1;
constexpr int kExitNumericAbort = 2;

struct RunConfig {
  std::string domain;
  std::string config_path;
  std::string algo = "pgl";
  std::uint64_t seed = 0;
  int n_seeds = 1;
  int jobs = 1;
  long iterations = -1;  // -1: domain default
  double lr = -1.0;
  int anneal = -1;       // 0 = fixed temperature, 1/2/3 = schedule types
  double tau0 = -1.0;
  int stride = 10;
  int eps_cadence = 0;
  double tol = 1e-6;
  std::string out_dir = ".";
};

json run_config_to_json(const RunConfig& config) {
  json j;
  j["domain"] = config.domain;
  j["config"] = config.config_path;
  j["algo"] = config.algo;
  j["seed"] = config.seed;
  j["seeds"] = config.n_seeds;
  j["jobs"] = config.jobs;
  j["iters"] = config.iterations;
  j["lr"] = config.lr;
  j["anneal"] = config.anneal;
  j["tau0"] = config.tau0;
  j["stride"] = config.stride;
  j["eps_cadence"] = config.eps_cadence;
  j["tol"] = config.tol;
  j["out"] = config.out_dir;
  return j;
}

struct ResolvedGame {
  cmg::GameSpec spec;
  cmg::UtilitySpec utilities;
  cmg::SolverDefaults defaults;
};

ResolvedGame resolve_game(const RunConfig& config) {
  if (config.domain.empty() == config.config_path.empty()) {
    throw cmg::SpecError("exactly one of --domain or --config must be given");
  }
  ResolvedGame game;
  if (!config.domain.empty()) {
    const cmg::DomainCatalogEntry* entry = cmg::find_domain(config.domain);
    if (entry == nullptr) {
      throw cmg::SpecError("unknown domain '" + config.domain +
                           "'; see `cmg list-domains`");
    }
    game.spec = entry->spec;
    game.utilities = entry->utilities;
    game.defaults = entry->defaults;
  } else {
    std::ifstream in(config.config_path);
    if (!in) {
      throw cmg::SpecError("cannot open config file " + config.config_path);
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    cmg::LoadedGame loaded = cmg::load_spec(buffer.str());
    game.spec = std::move(loaded.spec);
    game.utilities = std::move(loaded.utilities);
  }
  return game;
}

cmg::SolveOptions make_options(const RunConfig& config,
                               const cmg::SolverDefaults& defaults) {
  cmg::SolveOptions options;
  options.iterations =
      config.iterations >= 0 ? config.iterations : defaults.iterations;
  options.adam.lr = config.lr >= 0.0 ? config.lr : defaults.lr;
  options.schedule.initial_tau =
      config.tau0 >= 0.0 ? config.tau0 : defaults.initial_tau;
  if (config.anneal < 0) {
    options.schedule.type = defaults.anneal;
  } else {
    switch (config.anneal) {
      case 0: options.schedule.type = cmg::AnnealType::kNone; break;
      case 1: options.schedule.type = cmg::AnnealType::kType1; break;
      case 2: options.schedule.type = cmg::AnnealType::kType2; break;
      case 3: options.schedule.type = cmg::AnnealType::kType3; break;
      default:
        throw cmg::SpecError("--anneal must be one of 0, 1, 2, 3");
    }
  }
  options.trace_stride = config.stride;
  options.eps_cadence = config.eps_cadence;
  options.eps_tol = config.tol;
  return options;
}

std::string format_double(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

void write_file(const std::filesystem::path& path, const std::string& body) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << body;
}

void write_trace_csv(const std::filesystem::path& path,
                     const cmg::RunTrace& trace) {
  std::ostringstream out;
  out << "iter,tau,loss,bound,epsilon,wallclock_ms\n";
  for (const cmg::TracePoint& point : trace.points) {
    out << point.iter << "," << format_double(point.tau) << ","
        << format_double(point.loss) << "," << format_double(point.bound)
        << ",";
    if (point.epsilon.has_value()) out << format_double(*point.epsilon);
    out << "," << format_double(point.wallclock_ms) << "\n";
  }
  write_file(path, out.str());
}

json policy_to_json(const cmg::PolicyProfile& profile) {
  json policy = json::array();
  json argmax = json::array();
  for (const cmg::Matrix& pi : profile.policies) {
    json rows = json::array();
    json arg_rows = json::array();
    for (int s = 0; s < pi.rows(); ++s) {
      json row = json::array();
      int best = 0;
      for (int a = 0; a < pi.cols(); ++a) {
        row.push_back(pi(s, a));
        if (pi(s, a) > pi(s, best)) best = a;
      }
      rows.push_back(row);
      arg_rows.push_back(best);
    }
    policy.push_back(rows);
    argmax.push_back(arg_rows);
  }
  json root;
  root["policy"] = policy;
  root["argmax"] = argmax;
  return root;
}

cmg::PolicyProfile policy_from_json(const json& root,
                                    const cmg::GameSpec& spec) {
  if (!root.contains("policy")) {
    throw cmg::SpecError("policy file is missing the 'policy' field");
  }
  const json& policy = root["policy"];
  if (!policy.is_array() ||
      static_cast<int>(policy.size()) != spec.n_players) {
    throw cmg::SpecError("policy file does not match the domain's players");
  }
  cmg::PolicyProfile profile;
  for (int i = 0; i < spec.n_players; ++i) {
    const json& rows = policy[i];
    if (static_cast<int>(rows.size()) != spec.n_states) {
      throw cmg::SpecError("policy file does not match the domain's states");
    }
    cmg::Matrix pi(spec.n_states, spec.action_counts[i]);
    for (int s = 0; s < spec.n_states; ++s) {
      const json& row = rows[s];
      if (static_cast<int>(row.size()) != spec.action_counts[i]) {
        throw cmg::SpecError("policy file does not match the action counts");
      }
      for (int a = 0; a < spec.action_counts[i]; ++a) {
        pi(s, a) = row[a].get<double>();
      }
    }
    profile.policies.push_back(pi);
  }
  cmg::check_profile(spec, profile);
  return profile;
}

// Base-game per-player utilities (annealed terms off).
std::vector<double> final_utilities(const ResolvedGame& game,
                                    const cmg::PolicyProfile& profile) {
  std::vector<double> utilities;
  for (int i = 0; i < game.spec.n_players; ++i) {
    const cmg::Matrix mu = cmg::player_occupancy(game.spec, profile, i);
    const cmg::Matrix r_vec =
        cmg::aggregate_reward_vector(game.spec, game.utilities, profile, i);
    utilities.push_back(cmg::utility_value(game.utilities.player_terms[i], mu,
                                           r_vec, /*tau=*/0.0));
  }
  return utilities;
}

int run_solve_one(const RunConfig& config, const ResolvedGame& game,
                  std::uint64_t seed, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  const cmg::SolveOptions options = make_options(config, game.defaults);

  cmg::LogitProfile init =
      game.defaults.gaussian_init
          ? cmg::gaussian_logits(game.spec, seed)
          : cmg::uniform_logits(game.spec);

  cmg::SolveResult result;
  if (config.algo == "pgl") {
    result = cmg::pgl_minimize(game.spec, game.utilities, init, options);
  } else if (config.algo == "sim") {
    result = cmg::sim_descent(game.spec, game.utilities, init,
                              options.adam.lr, options.iterations,
                              /*tau=*/0.0, options.trace_stride);
  } else if (config.algo == "rr") {
    result = cmg::rr_descent(game.spec, game.utilities, init, options.adam.lr,
                             options.iterations, /*tau=*/0.0,
                             options.trace_stride);
  } else {
    throw cmg::SpecError("unknown --algo '" + config.algo + "'");
  }

  write_trace_csv(out_dir / "trace.csv", result.trace);
  if (result.aborted) {
    std::cerr << "numeric abort; partial trace written to "
              << (out_dir / "trace.csv") << "\n";
    return kExitNumericAbort;
  }

  write_file(out_dir / "policy.json", policy_to_json(result.policy).dump(2));

  const cmg::ExploitabilityReport report = cmg::exploitability(
      game.spec, game.utilities, result.policy, config.tol, /*tau=*/0.0);
  const cmg::PerStateExploitability per_state = cmg::per_state_exploitability(
      game.spec, game.utilities, result.policy, config.tol, /*tau=*/0.0);

  json summary;
  summary["final_utilities"] = final_utilities(game, result.policy);
  summary["per_player_epsilon"] = report.per_player;
  summary["final_epsilon"] = report.max_epsilon;
  summary["per_state_epsilon"] = per_state.per_state;
  summary["per_state_max_epsilon"] = per_state.max_epsilon;
  summary["certified"] = report.certified && per_state.certified;
  summary["seed"] = seed;
  summary["config"] = run_config_to_json(config);
  write_file(out_dir / "summary.json", summary.dump(2));

  std::cout << "seed " << seed << ": epsilon = "
            << format_double(report.max_epsilon) << ", artifacts in "
            << out_dir << "\n";
  return kExitOk;
}

int cmd_solve(const RunConfig& config) {
  const ResolvedGame game = resolve_game(config);
  const std::filesystem::path base(config.out_dir);

  if (config.n_seeds <= 1) {
    return run_solve_one(config, game, config.seed, base);
  }

  // Independent seeds; each run is internally deterministic.
  std::atomic<int> next(0);
  std::atomic<int> status(kExitOk);
  std::mutex io_mutex;
  const int jobs = std::max(1, config.jobs);
  auto worker = [&]() {
    while (true) {
      const int k = next.fetch_add(1);
      if (k >= config.n_seeds) return;
      const std::uint64_t seed = config.seed + k;
      try {
        const int code = run_solve_one(config, game, seed,
                                       base / ("seed_" + std::to_string(seed)));
        if (code != kExitOk) status.store(code);
      } catch (const std::exception& error) {
        std::lock_guard<std::mutex> lock(io_mutex);
        std::cerr << "seed " << seed << " failed: " << error.what() << "\n";
        status.store(kExitNumericAbort);
      }
    }
  };
  std::vector<std::thread> pool;
  for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
  for (std::thread& thread : pool) thread.join();
  return status.load();
}

int cmd_exploitability(const RunConfig& config,
                       const std::string& policy_path) {
  const ResolvedGame game = resolve_game(config);
  std::ifstream in(policy_path);
  if (!in) throw cmg::SpecError("cannot open policy file " + policy_path);
  json root;
  try {
    root = json::parse(in);
  } catch (const json::parse_error& error) {
    throw cmg::SpecError(std::string("policy parse error: ") + error.what());
  }
  const cmg::PolicyProfile profile = policy_from_json(root, game.spec);

  const cmg::ExploitabilityReport report = cmg::exploitability(
      game.spec, game.utilities, profile, config.tol, /*tau=*/0.0);
  const cmg::PerStateExploitability per_state = cmg::per_state_exploitability(
      game.spec, game.utilities, profile, config.tol, /*tau=*/0.0);

  std::cout << "per-player epsilon:";
  for (double eps : report.per_player) std::cout << " " << format_double(eps);
  std::cout << "\nmax epsilon: " << format_double(report.max_epsilon) << "\n";
  std::cout << "per-state epsilon (max over players):\n";
  for (int s = 0; s < static_cast<int>(per_state.per_state.size()); ++s) {
    std::cout << "  state " << s << ": "
              << format_double(per_state.per_state[s]) << "\n";
  }
  std::cout << "max per-state epsilon: "
            << format_double(per_state.max_epsilon) << "\n";

  json out;
  out["per_player"] = report.per_player;
  out["max"] = report.max_epsilon;
  out["per_state"] = per_state.per_state;
  out["per_state_max"] = per_state.max_epsilon;
  out["certified"] = report.certified && per_state.certified;
  std::filesystem::create_directories(config.out_dir);
  write_file(std::filesystem::path(config.out_dir) / "epsilon.json",
             out.dump(2));
  return kExitOk;
}

int cmd_list_domains() {
  for (const cmg::DomainCatalogEntry& entry : cmg::domain_catalog()) {
    std::string anneal;
    switch (entry.defaults.anneal) {
      case cmg::AnnealType::kNone: anneal = "fixed"; break;
      case cmg::AnnealType::kType1: anneal = "type 1"; break;
      case cmg::AnnealType::kType2: anneal = "type 2"; break;
      case cmg::AnnealType::kType3: anneal = "type 3"; break;
    }
    std::cout << entry.name << ": players=" << entry.spec.n_players
              << " states=" << entry.spec.n_states << " actions=[";
    for (std::size_t i = 0; i < entry.spec.action_counts.size(); ++i) {
      if (i > 0) std::cout << ",";
      std::cout << entry.spec.action_counts[i];
    }
    std::cout << "] lr=" << format_double(entry.defaults.lr)
              << " anneal=" << anneal << " iters=" << entry.defaults.iterations
              << " tau0=" << format_double(entry.defaults.initial_tau)
              << "\n    " << entry.description << "\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cmg: solvers and exploitability certification for convex "
               "Markov games"};
  app.require_subcommand(1);

  RunConfig config;
  std::string policy_path;

  CLI::App* solve = app.add_subcommand("solve", "solve a domain or config");
  solve->add_option("--domain", config.domain, "built-in domain name");
  solve->add_option("--config", config.config_path, "game config JSON path");
  solve->add_option("--algo", config.algo, "pgl | sim | rr");
  solve->add_option("--seed", config.seed, "base RNG seed");
  solve->add_option("--seeds", config.n_seeds, "number of consecutive seeds");
  solve->add_option("--jobs", config.jobs, "parallel runs for --seeds > 1");
  solve->add_option("--iters", config.iterations, "iteration budget");
  solve->add_option("--lr", config.lr, "learning rate");
  solve->add_option("--anneal", config.anneal,
                    "annealing schedule: 1, 2, 3, or 0 for fixed");
  solve->add_option("--tau0", config.tau0, "initial temperature");
  solve->add_option("--stride", config.stride, "trace stride");
  solve->add_option("--eps-cadence", config.eps_cadence,
                    "exact-epsilon cadence in anneal events (0 = off)");
  solve->add_option("--tol", config.tol, "exploitability tolerance");
  solve->add_option("--out", config.out_dir, "output directory");

  CLI::App* expl = app.add_subcommand(
      "exploitability", "certify a saved policy's exploitability");
  expl->add_option("--domain", config.domain, "built-in domain name");
  expl->add_option("--config", config.config_path, "game config JSON path");
  expl->add_option("--policy", policy_path, "policy.json path")->required();
  expl->add_option("--tol", config.tol, "exploitability tolerance");
  expl->add_option("--out", config.out_dir, "output directory");

  CLI::App* list = app.add_subcommand("list-domains", "print the catalog");

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve->parsed()) return cmd_solve(config);
    if (expl->parsed()) return cmd_exploitability(config, policy_path);
    if (list->parsed()) return cmd_list_domains();
  } catch (const cmg::SpecError& error) {
    std::cerr << "error: " << error.what() << "\n";
    return kExitInvalidConfig;
  } catch (const cmg::NumericError& error) {
    std::cerr << "numeric error: " << error.what() << "\n";
    return kExitNumericAbort;
  } catch (const std::exception& error) {
    std::cerr << "error: " << error.what() << "\n";
    return kExitInvalidConfig;
  }
  return kExitOk;
}
