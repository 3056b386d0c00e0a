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

#ifndef CMG_UTILITIES_HPP_
#define CMG_UTILITIES_HPP_

#include <variant>
#include <vector>

#include "cmg/game.hpp"

namespace cmg {

// Concave utility components over a player's own occupancy measure mu_i
// (a [n_states, n_actions_i] matrix). Terms flagged `annealed` take their
// weight from the live temperature passed to the evaluation functions; all
// other terms use their stored coefficients.

// r^T mu with r the player's own reward tensor, flat [s, a_1, ..., a_n]
// (same joint-action order as GameSpec::transition). Opponent actions are
// averaged out under their current policies before evaluation.
struct LinearReward {
  std::vector<double> reward;
};

// + tau * H(mu), Shannon entropy in nats over all (s, a) cells, 0 log 0 := 0.
struct EntropyBonus {
  double tau = 1.0;
  bool annealed = true;
};

// - tau * KL(mu || mu_ref); mu_ref must be strictly positive.
struct KLPenalty {
  double tau = 1.0;
  Matrix mu_ref;
  bool annealed = true;
};

// - weight * (sum_a mu(s_plus, a) - sum_a mu(s_minus, a))^2.
struct FairnessPenalty {
  int s_plus = 0;
  int s_minus = 0;
  double weight = 1.0;
};

// - weight * max(0, mu(state, action) - threshold).
struct HingePenalty {
  int state = 0;
  int action = 0;
  double threshold = 0.0;
  double weight = 0.0;
};

// - max(0, ||mu_a - target_action||_inf - radius_action)
// - max(0, ||mu_s - target_state||_inf - radius_state),
// where mu_a and mu_s are the action and state marginals of mu.
struct InfNormSafety {
  Vector target_action;
  Vector target_state;
  double radius_action = 0.05;
  double radius_state = 0.25;
};

using UtilityTerm = std::variant<LinearReward, EntropyBonus, KLPenalty,
                                 FairnessPenalty, HingePenalty, InfNormSafety>;

// One term list per player.
struct UtilitySpec {
  std::vector<std::vector<UtilityTerm>> player_terms;

  int n_players() const { return static_cast<int>(player_terms.size()); }
};

// Throws SpecError on ill-formed terms (negative weights on penalties,
// nonpositive KL reference entries, out-of-range indices, shape mismatches).
void check_utilities(const GameSpec& spec, const UtilitySpec& utilities);

// Expected reward vector r_i(pi_{-i})(s, a_i) = E_{a_{-i} ~ pi_{-i}}[r_i].
// `reward` is the player's own tensor, flat [s, a_1, ..., a_n].
Matrix expected_reward_vector(const GameSpec& spec,
                              const std::vector<double>& reward,
                              const PolicyProfile& profile, int player);

// Sum of expected_reward_vector over all LinearReward terms of `player`
// (zero matrix when there are none).
Matrix aggregate_reward_vector(const GameSpec& spec,
                               const UtilitySpec& utilities,
                               const PolicyProfile& profile, int player);

// Directional derivative of aggregate_reward_vector when player `j`'s policy
// row at state `state` moves along `dpi_row` (all other rows fixed). Only the
// `state` row of the result can be nonzero. Requires j != player.
Matrix aggregate_reward_vector_jvp(const GameSpec& spec,
                                   const UtilitySpec& utilities,
                                   const PolicyProfile& profile, int player,
                                   int j, int state, const Vector& dpi_row);

// Value of the player's utility at occupancy mu. `r_vec` carries the linear
// part (see aggregate_reward_vector); `tau` is the live temperature applied
// to annealed terms.
double utility_value(const std::vector<UtilityTerm>& terms, const Matrix& mu,
                     const Matrix& r_vec, double tau);

// (Sub)gradient with respect to mu, same shape as mu. Hinge-style terms at
// their kink contribute the zero subgradient; the inf-norm term routes its
// subgradient through the lowest-index maximizing cell.
Matrix utility_gradient(const std::vector<UtilityTerm>& terms,
                        const Matrix& mu, const Matrix& r_vec, double tau);

// Directional derivative of utility_gradient along dmu with dr_vec the
// matching perturbation of the linear part (hinge-style terms are piecewise
// constant and contribute nothing almost everywhere).
Matrix utility_gradient_jvp(const std::vector<UtilityTerm>& terms,
                            const Matrix& mu, const Matrix& dmu,
                            const Matrix& dr_vec, double tau);

// True if any term has an effective nonlinear contribution at temperature
// tau (i.e. the gradient depends on mu).
bool has_nonlinear_terms(const std::vector<UtilityTerm>& terms, double tau);

}  // namespace cmg

#endif  // CMG_UTILITIES_HPP_
