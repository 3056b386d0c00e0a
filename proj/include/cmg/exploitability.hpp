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

#ifndef CMG_EXPLOITABILITY_HPP_
#define CMG_EXPLOITABILITY_HPP_

#include <vector>

#include "cmg/game.hpp"
#include "cmg/utilities.hpp"

namespace cmg {

// Maximizes reward_vec^T mu over player i's occupancy polytope by solving the
// induced single-agent MDP with value iteration (residual 1e-12), extracting
// the greedy deterministic policy (ties to the lowest action index), and
// returning its occupancy. This is the linear minimization oracle used by
// Frank-Wolfe.
Matrix linear_best_response(const GameSpec& spec, const PolicyProfile& profile,
                            int player, const Matrix& reward_vec);

struct BestResponseResult {
  Matrix mu;             // best occupancy found, [n_states, n_actions]
  double utility = 0.0;  // u at mu
  double gap = 0.0;      // certified bound on (true max - utility)
  long iterations = 0;   // Frank-Wolfe steps taken
  bool certified = false;  // gap <= requested tolerance
};

// Frank-Wolfe over the occupancy polytope, started from the profile's own
// occupancy, with the value-iteration oracle as LMO and a golden-section line
// search (the restriction of a concave utility to a segment is concave).
// Annealed utility terms evaluate at temperature tau.
BestResponseResult best_response(const GameSpec& spec,
                                 const UtilitySpec& utilities,
                                 const PolicyProfile& profile, int player,
                                 double tol = 1e-6, long max_iters = 100000,
                                 double tau = 0.0);

struct ExploitabilityReport {
  std::vector<double> per_player;  // epsilon_i >= 0
  double max_epsilon = 0.0;
  bool certified = false;  // all best responses met their tolerance
};

// epsilon_i = best_response(i).utility - u_i(own occupancy), clipped to >= 0;
// epsilon = max_i epsilon_i. By default the base game is certified (tau = 0,
// annealed terms off).
ExploitabilityReport exploitability(const GameSpec& spec,
                                    const UtilitySpec& utilities,
                                    const PolicyProfile& profile,
                                    double tol = 1e-6, double tau = 0.0);

struct PerStateExploitability {
  std::vector<double> per_state;  // max over players, one per initial state
  std::vector<std::vector<double>> per_state_per_player;
  double max_epsilon = 0.0;
  bool certified = false;
};

// Recomputes exploitability with mu0 replaced by each point mass delta_s.
PerStateExploitability per_state_exploitability(const GameSpec& spec,
                                                const UtilitySpec& utilities,
                                                const PolicyProfile& profile,
                                                double tol = 1e-6,
                                                double tau = 0.0);

}  // namespace cmg

#endif  // CMG_EXPLOITABILITY_HPP_
