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

#ifndef CMG_DOMAINS_HPP_
#define CMG_DOMAINS_HPP_

#include <optional>
#include <string>
#include <vector>

#include "cmg/game.hpp"
#include "cmg/solvers.hpp"
#include "cmg/utilities.hpp"

namespace cmg {

struct SolverDefaults {
  double lr = 0.1;
  AnnealType anneal = AnnealType::kType1;
  long iterations = 8000;
  double initial_tau = 1.0;
  bool gaussian_init = false;  // standard-normal logits instead of uniform
};

// Published endpoint values used by the acceptance suite.
struct ReferenceResults {
  std::optional<std::vector<int>> argmax_actions;  // player 0, per state
  std::optional<double> utility;                   // per-player, base game
  double utility_tol = 0.0;
  std::optional<double> epsilon_threshold;         // final epsilon bound
};

struct DomainCatalogEntry {
  std::string name;
  std::string description;
  GameSpec spec;
  UtilitySpec utilities;
  SolverDefaults defaults;
  ReferenceResults reference;
};

// Iterated normal-form game: one state per joint action, deterministic
// transition to the state matching the joint action just played, uniform mu0,
// and rewards that depend on the joint action only. payoffs[i] is indexed by
// joint action (same mixed-radix order as GameSpec).
GameSpec build_iterated_nfg(const std::vector<std::vector<double>>& payoffs,
                            const std::vector<int>& action_counts,
                            double gamma = 0.99);

// Per-player reward tensors [s, a_1..a_n] for the same construction.
std::vector<std::vector<double>> iterated_nfg_rewards(
    const std::vector<std::vector<double>>& payoffs,
    const std::vector<int>& action_counts);

DomainCatalogEntry build_ipd();
DomainCatalogEntry build_imitation_ipd();
DomainCatalogEntry build_ipgg();
DomainCatalogEntry build_elfarol();
DomainCatalogEntry build_bach_stravinsky(bool with_fairness);
DomainCatalogEntry build_synthetic_safety();
DomainCatalogEntry build_warehouse(bool with_safety);

// The iterated prisoner's dilemma profile estimated from human play,
// symmetric across players.
PolicyProfile human_ipd_profile();

// The fixed opponent policy of the synthetic domain's illustration,
// pi_2(a_0 | s_0) = 0.4 and pi_2(a_0 | s_1) = 0.8.
Matrix synthetic_reference_opponent();

// All domains, sorted by name.
const std::vector<DomainCatalogEntry>& domain_catalog();

// Returns nullptr when the name is unknown.
const DomainCatalogEntry* find_domain(const std::string& name);

}  // namespace cmg

#endif  // CMG_DOMAINS_HPP_
