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

#include "cmg/domains.hpp"

#include <algorithm>
#include <cmath>

#include "cmg/occupancy.hpp"

namespace cmg {

namespace {

// Adds per-player linear reward plus an annealed entropy bonus.
UtilitySpec linear_entropy_utilities(
    const std::vector<std::vector<double>>& rewards) {
  UtilitySpec utilities;
  for (const std::vector<double>& reward : rewards) {
    utilities.player_terms.push_back(
        {LinearReward{reward}, EntropyBonus{1.0, /*annealed=*/true}});
  }
  return utilities;
}

}  // namespace

std::vector<std::vector<double>> iterated_nfg_rewards(
    const std::vector<std::vector<double>>& payoffs,
    const std::vector<int>& action_counts) {
  int n_joint = 1;
  for (int a : action_counts) n_joint *= a;
  const int n_states = n_joint;
  std::vector<std::vector<double>> rewards;
  rewards.reserve(payoffs.size());
  for (const std::vector<double>& payoff : payoffs) {
    if (static_cast<int>(payoff.size()) != n_joint) {
      throw SpecError("payoff tensor size mismatch");
    }
    std::vector<double> reward(static_cast<std::size_t>(n_states) * n_joint);
    for (int s = 0; s < n_states; ++s) {
      for (int joint = 0; joint < n_joint; ++joint) {
        reward[static_cast<std::size_t>(s) * n_joint + joint] = payoff[joint];
      }
    }
    rewards.push_back(std::move(reward));
  }
  return rewards;
}

GameSpec build_iterated_nfg(const std::vector<std::vector<double>>& payoffs,
                            const std::vector<int>& action_counts,
                            double gamma) {
  GameSpec spec;
  spec.n_players = static_cast<int>(action_counts.size());
  spec.action_counts = action_counts;
  const int n_joint = spec.joint_action_count();
  spec.n_states = n_joint;  // state = previous joint action
  spec.gamma = gamma;
  spec.mu0 = Vector::Constant(spec.n_states, 1.0 / spec.n_states);
  spec.transition.assign(
      static_cast<std::size_t>(spec.n_states) * spec.n_states * n_joint, 0.0);
  for (int s = 0; s < spec.n_states; ++s) {
    for (int joint = 0; joint < n_joint; ++joint) {
      // next state encodes the joint action, independent of s
      const int s_next = joint;
      spec.transition[(static_cast<std::size_t>(s_next) * spec.n_states + s) *
                          n_joint +
                      joint] = 1.0;
    }
  }
  if (static_cast<int>(payoffs.size()) != spec.n_players) {
    throw SpecError("payoff list size does not match player count");
  }
  return spec;
}

DomainCatalogEntry build_ipd() {
  // Prisoner's dilemma, shifted and normalized into [0, 1]; C = 0, D = 1.
  const std::vector<std::vector<double>> payoffs = {
      {2.0 / 3.0, 0.0, 1.0, 1.0 / 3.0},
      {2.0 / 3.0, 1.0, 0.0, 1.0 / 3.0},
  };
  const std::vector<int> actions = {2, 2};
  DomainCatalogEntry entry;
  entry.name = "ipd";
  entry.description = "iterated prisoner's dilemma with an entropy bonus";
  entry.spec = build_iterated_nfg(payoffs, actions);
  entry.utilities =
      linear_entropy_utilities(iterated_nfg_rewards(payoffs, actions));
  entry.defaults = {0.1, AnnealType::kType1, 8000, 1.0, false};
  entry.reference.argmax_actions = std::vector<int>{0, 1, 0, 1};
  entry.reference.utility = 0.47;
  entry.reference.utility_tol = 0.05;
  entry.reference.epsilon_threshold = 1e-2;
  return entry;
}

PolicyProfile human_ipd_profile() {
  // Cooperation probabilities conditioned on the previous joint action
  // (own action first); the profile is symmetric, so player 2's row for
  // state (x, y) is player 1's row for (y, x).
  Matrix pi1(4, 2);
  pi1 << 0.86, 0.14,   // (C, C)
      0.35, 0.65,      // (C, D)
      0.45, 0.55,      // (D, C)
      0.13, 0.87;      // (D, D)
  Matrix pi2(4, 2);
  pi2.row(0) = pi1.row(0);
  pi2.row(1) = pi1.row(2);
  pi2.row(2) = pi1.row(1);
  pi2.row(3) = pi1.row(3);
  return PolicyProfile{{pi1, pi2}};
}

DomainCatalogEntry build_imitation_ipd() {
  DomainCatalogEntry entry = build_ipd();
  entry.name = "ipd-imitation";
  entry.description =
      "iterated prisoner's dilemma with an annealed KL penalty to the "
      "human occupancy measure";
  entry.defaults = {0.01, AnnealType::kType1, 8000, 1.0, false};
  entry.reference.argmax_actions.reset();
  entry.reference.utility = 0.46;
  entry.reference.utility_tol = 0.01;
  entry.reference.epsilon_threshold = 1e-3;

  const PolicyProfile human = human_ipd_profile();
  entry.utilities.player_terms.clear();
  for (int i = 0; i < 2; ++i) {
    Matrix mu_ref = player_occupancy(entry.spec, human, i);
    // Floor and renormalize so the KL reference is strictly positive.
    mu_ref = mu_ref.cwiseMax(1e-9);
    mu_ref /= mu_ref.sum();
    const std::vector<double> reward = iterated_nfg_rewards(
        {{2.0 / 3.0, 0.0, 1.0, 1.0 / 3.0}, {2.0 / 3.0, 1.0, 0.0, 1.0 / 3.0}},
        {2, 2})[i];
    entry.utilities.player_terms.push_back(
        {LinearReward{reward}, KLPenalty{1.0, mu_ref, /*annealed=*/true}});
  }
  return entry;
}

DomainCatalogEntry build_ipgg() {
  // Public goods: contribute all (1) or none (0) of a unit endowment; the
  // pool grows by 1.3 and is split evenly; payoff is profit.
  const std::vector<int> actions = {2, 2, 2};
  std::vector<std::vector<double>> payoffs(3, std::vector<double>(8));
  for (int joint = 0; joint < 8; ++joint) {
    const int a1 = (joint >> 2) & 1, a2 = (joint >> 1) & 1, a3 = joint & 1;
    const double pool = 1.3 * (a1 + a2 + a3);
    const double share = pool / 3.0;
    payoffs[0][joint] = share - a1;
    payoffs[1][joint] = share - a2;
    payoffs[2][joint] = share - a3;
  }
  DomainCatalogEntry entry;
  entry.name = "ipgg";
  entry.description = "iterated public goods game, growth multiplier 1.3";
  entry.spec = build_iterated_nfg(payoffs, actions);
  entry.utilities =
      linear_entropy_utilities(iterated_nfg_rewards(payoffs, actions));
  entry.defaults = {0.1, AnnealType::kType1, 8000, 1.0, false};
  entry.reference.argmax_actions = std::vector<int>{0, 0, 0, 1, 0, 1, 1, 1};
  entry.reference.utility = 0.03;
  entry.reference.utility_tol = 0.03;
  entry.reference.epsilon_threshold = 1e-2;
  return entry;
}

DomainCatalogEntry build_elfarol() {
  // Three players choose bar (0) or home (1); the bar pays 2 unless all
  // three attend, home pays 1, a crowded bar pays 0.
  const std::vector<int> actions = {2, 2, 2};
  std::vector<std::vector<double>> payoffs(3, std::vector<double>(8));
  for (int joint = 0; joint < 8; ++joint) {
    const int a[3] = {(joint >> 2) & 1, (joint >> 1) & 1, joint & 1};
    const int attendees = (a[0] == 0) + (a[1] == 0) + (a[2] == 0);
    for (int i = 0; i < 3; ++i) {
      if (a[i] == 1) {
        payoffs[i][joint] = 1.0;
      } else {
        payoffs[i][joint] = attendees < 3 ? 2.0 : 0.0;
      }
    }
  }
  DomainCatalogEntry entry;
  entry.name = "elfarol";
  entry.description = "three-player iterated El Farol bar problem";
  entry.spec = build_iterated_nfg(payoffs, actions);
  entry.utilities =
      linear_entropy_utilities(iterated_nfg_rewards(payoffs, actions));
  entry.defaults = {0.1, AnnealType::kType1, 8000, 1.0, false};
  return entry;
}

DomainCatalogEntry build_bach_stravinsky(bool with_fairness) {
  // Bach = 0, Stravinsky = 1; player 1 prefers Bach, player 2 Stravinsky.
  const std::vector<std::vector<double>> payoffs = {
      {3.0, 0.0, 0.0, 2.0},
      {2.0, 0.0, 0.0, 3.0},
  };
  const std::vector<int> actions = {2, 2};
  DomainCatalogEntry entry;
  entry.name = with_fairness ? "bach-stravinsky-fair" : "bach-stravinsky";
  entry.description =
      with_fairness
          ? "Bach-Stravinsky with a squared penalty on unequal attendance"
          : "iterated Bach-Stravinsky coordination game";
  entry.spec = build_iterated_nfg(payoffs, actions);
  const auto rewards = iterated_nfg_rewards(payoffs, actions);
  entry.utilities = linear_entropy_utilities(rewards);
  if (with_fairness) {
    // States 0 = (B, B) and 3 = (S, S).
    for (auto& terms : entry.utilities.player_terms) {
      terms.push_back(FairnessPenalty{0, 3, 1.0});
    }
    entry.defaults = {0.1, AnnealType::kNone, 1000, 0.0, true};
    entry.reference.epsilon_threshold = 1e-4;
  } else {
    entry.defaults = {0.1, AnnealType::kType1, 1000, 1.0, false};
  }
  return entry;
}

Matrix synthetic_reference_opponent() {
  Matrix pi(2, 2);
  pi << 0.40, 0.60, 0.80, 0.20;
  return pi;
}

DomainCatalogEntry build_synthetic_safety() {
  // Two states, two players, two actions; both playing action 0 swaps the
  // state, anything else keeps it. No conventional rewards; safety is an
  // inf-norm ball around uniform action and state marginals.
  GameSpec spec;
  spec.n_players = 2;
  spec.n_states = 2;
  spec.action_counts = {2, 2};
  spec.gamma = 0.95;
  spec.mu0 = Vector::Constant(2, 0.5);
  spec.transition.assign(2 * 2 * 4, 0.0);
  auto set = [&spec](int s_next, int s, int a1, int a2, double p) {
    spec.transition[(static_cast<std::size_t>(s_next) * 2 + s) * 4 + a1 * 2 +
                    a2] = p;
  };
  const double epsilon = 0.0;
  set(1, 0, 0, 0, 1.0 - epsilon);
  set(1, 0, 0, 1, epsilon);
  set(1, 0, 1, 0, epsilon);
  set(1, 0, 1, 1, 0.0);
  set(0, 1, 0, 0, 1.0 - epsilon);
  set(0, 1, 0, 1, epsilon);
  set(0, 1, 1, 0, epsilon);
  set(0, 1, 1, 1, 0.0);
  for (int a1 = 0; a1 < 2; ++a1) {
    for (int a2 = 0; a2 < 2; ++a2) {
      set(0, 0, a1, a2,
          1.0 - spec.transition[(static_cast<std::size_t>(1) * 2 + 0) * 4 +
                                a1 * 2 + a2]);
      set(1, 1, a1, a2,
          1.0 - spec.transition[(static_cast<std::size_t>(0) * 2 + 1) * 4 +
                                a1 * 2 + a2]);
    }
  }

  DomainCatalogEntry entry;
  entry.name = "synthetic-safety";
  entry.description =
      "two-state safety domain with inf-norm occupancy targets";
  entry.spec = spec;
  InfNormSafety safety;
  safety.target_action = Vector::Constant(2, 0.5);
  safety.target_state = Vector::Constant(2, 0.5);
  safety.radius_action = 1.0 / 20.0;
  safety.radius_state = 1.0 / 4.0;
  for (int i = 0; i < 2; ++i) {
    entry.utilities.player_terms.push_back(
        {UtilityTerm{safety}, UtilityTerm{EntropyBonus{1.0, true}}});
  }
  entry.defaults = {0.1, AnnealType::kType2, 8000, 1.0, false};
  entry.reference.epsilon_threshold = 1e-6;
  return entry;
}

DomainCatalogEntry build_warehouse(bool with_safety) {
  // Three-cell warehouse: states are (robot 1 location, robot 2 location)
  // in {pickup, dropoff}^2, actions are slow (0) / fast (1). Tensors follow
  // the published listing; the two derived complement cells at the
  // (pickup, pickup) state with mismatched speeds come out negative there
  // (the listing only asserts column sums), so those columns are repaired by
  // zeroing the joint-move cell, which preserves each robot's marginal
  // success probabilities.
  const double p_reset = 1.0;
  const double p_drop_alone_slow = 0.7;
  const double p_drop_alone_fast = 0.8;
  const double p_low = 0.2;
  const double p_mid = 0.5;
  const double p_high = 0.8;

  GameSpec spec;
  spec.n_players = 2;
  spec.n_states = 4;
  spec.action_counts = {2, 2};
  spec.gamma = 0.99;
  spec.mu0 = Vector::Constant(4, 0.25);
  spec.transition.assign(4 * 4 * 4, 0.0);
  auto at = [&spec](int s_next, int s, int a1, int a2) -> double& {
    return spec.transition[(static_cast<std::size_t>(s_next) * 4 + s) * 4 +
                           a1 * 2 + a2];
  };

  // s = 0: (pickup, pickup), s = 1: (pickup, dropoff),
  // s = 2: (dropoff, pickup), s = 3: (dropoff, dropoff).
  for (int a1 = 0; a1 < 2; ++a1) {
    for (int a2 = 0; a2 < 2; ++a2) {
      const double p1 = a1 == 0 ? p_drop_alone_slow : p_drop_alone_fast;
      const double p2 = a2 == 0 ? p_drop_alone_slow : p_drop_alone_fast;
      at(0, 1, a1, a2) = (1.0 - p1) * p_reset;
      at(1, 1, a1, a2) = (1.0 - p1) * (1.0 - p_reset);
      at(2, 1, a1, a2) = p1 * p_reset;
      at(0, 2, a1, a2) = p_reset * (1.0 - p2);
      at(1, 2, a1, a2) = p_reset * p2;
      at(2, 2, a1, a2) = (1.0 - p_reset) * (1.0 - p2);
      at(0, 3, a1, a2) = p_reset;
      at(1, 3, a1, a2) = p_reset * (1.0 - p_reset);
      at(2, 3, a1, a2) = (1.0 - p_reset) * p_reset;
    }
  }
  at(1, 0, 0, 0) = (1.0 - p_mid) * p_mid;
  at(1, 0, 0, 1) = p_high;
  at(1, 0, 1, 0) = p_low;
  at(1, 0, 1, 1) = p_low;
  at(2, 0, 0, 0) = p_mid * (1.0 - p_mid);
  at(2, 0, 0, 1) = p_low;
  at(2, 0, 1, 0) = p_high;
  at(2, 0, 1, 1) = p_low;
  at(3, 0, 0, 0) = p_mid;
  at(3, 0, 0, 1) = p_low;
  at(3, 0, 1, 0) = p_low;
  at(3, 0, 1, 1) = p_low;
  // Repair the over-committed mismatched-speed columns before deriving the
  // complements: drop the simultaneous-move mass, keeping the marginals
  // P(robot 2 moves) = p_high and P(robot 1 moves) = p_low (and vice versa).
  at(3, 0, 0, 1) = 0.0;
  at(3, 0, 1, 0) = 0.0;
  // Derived complements; clamp the 1e-16-scale residue of sums like
  // 0.8 + 0.2 that are inexact in binary.
  auto complement = [](double x) { return x < 0.0 && x > -1e-12 ? 0.0 : x; };
  for (int a1 = 0; a1 < 2; ++a1) {
    for (int a2 = 0; a2 < 2; ++a2) {
      for (int s = 1; s < 4; ++s) {
        at(3, s, a1, a2) = complement(
            1.0 - at(0, s, a1, a2) - at(1, s, a1, a2) - at(2, s, a1, a2));
      }
      at(0, 0, a1, a2) = complement(
          1.0 - at(1, 0, a1, a2) - at(2, 0, a1, a2) - at(3, 0, a1, a2));
    }
  }

  // +1 for a slow drop-off, +2 for a fast one.
  std::vector<std::vector<double>> rewards(
      2, std::vector<double>(static_cast<std::size_t>(4) * 4, 0.0));
  auto reward_at = [](std::vector<double>& r, int s, int a1,
                      int a2) -> double& {
    return r[static_cast<std::size_t>(s) * 4 + a1 * 2 + a2];
  };
  for (int other = 0; other < 2; ++other) {
    reward_at(rewards[1], 1, other, 0) = 1.0;
    reward_at(rewards[1], 1, other, 1) = 2.0;
    reward_at(rewards[0], 2, 0, other) = 1.0;
    reward_at(rewards[0], 2, 1, other) = 2.0;
    reward_at(rewards[0], 3, 0, other) = 1.0;
    reward_at(rewards[0], 3, 1, other) = 2.0;
    reward_at(rewards[1], 3, other, 0) = 1.0;
    reward_at(rewards[1], 3, other, 1) = 2.0;
  }

  DomainCatalogEntry entry;
  entry.name = with_safety ? "warehouse-safe" : "warehouse";
  entry.description =
      with_safety
          ? "robot warehouse with a hinge penalty on fast joint pickups"
          : "robot warehouse, rewards for package drop-offs";
  entry.spec = spec;
  entry.utilities = linear_entropy_utilities(rewards);
  if (with_safety) {
    // Penalize mu_i((pickup, pickup), fast) beyond 10%.
    for (auto& terms : entry.utilities.player_terms) {
      terms.push_back(HingePenalty{0, 1, 0.10, 100.0});
    }
  }
  entry.defaults = {0.01, AnnealType::kType2, 8000, 1.0, false};
  entry.reference.epsilon_threshold = with_safety ? 3.4e-2 : 1e-3;
  entry.reference.utility = with_safety ? 0.42 : 0.69;  // fast frequency
  entry.reference.utility_tol = 0.05;
  return entry;
}

const std::vector<DomainCatalogEntry>& domain_catalog() {
  static const std::vector<DomainCatalogEntry>* catalog = [] {
    auto* entries = new std::vector<DomainCatalogEntry>{
        build_bach_stravinsky(true),
        build_bach_stravinsky(false),
        build_elfarol(),
        build_ipd(),
        build_imitation_ipd(),
        build_ipgg(),
        build_synthetic_safety(),
        build_warehouse(false),
        build_warehouse(true),
    };
    std::sort(entries->begin(), entries->end(),
              [](const DomainCatalogEntry& a, const DomainCatalogEntry& b) {
                return a.name < b.name;
              });
    return entries;
  }();
  return *catalog;
}

const DomainCatalogEntry* find_domain(const std::string& name) {
  for (const DomainCatalogEntry& entry : domain_catalog()) {
    if (entry.name == name) return &entry;
  }
  return nullptr;
}

}  // namespace cmg
