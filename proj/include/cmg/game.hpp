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

#ifndef CMG_GAME_HPP_
#define CMG_GAME_HPP_

#include <Eigen/Dense>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace cmg {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Malformed game specification or configuration document.
class SpecError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Fatal numerical failure (singular solve, non-finite loss, ...).
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An n-player discounted stochastic game with concave utilities over
// occupancy measures attached separately (see utilities.hpp).
//
// The transition tensor is stored flat in row-major [s_next, s, a_1, ..., a_n]
// order with a_n varying fastest, so that published tensors in that layout
// paste in unchanged.
struct GameSpec {
  int n_players = 0;
  int n_states = 0;
  std::vector<int> action_counts;   // one entry per player
  std::vector<double> transition;   // n_states^2 * prod(action_counts)
  double gamma = 0.0;               // discount, in [0, 1)
  Vector mu0;                       // initial state distribution

  // Number of joint actions, prod_i action_counts[i].
  int joint_action_count() const;

  // Mixed-radix index of a joint action (a_1, ..., a_n), a_n fastest.
  int joint_index(const std::vector<int>& actions) const;

  // Decodes a joint index back into per-player actions.
  std::vector<int> joint_actions(int joint) const;

  // P(s_next | s, joint). No bounds checking beyond debug asserts.
  double transition_prob(int s_next, int s, int joint) const {
    const int na = joint_action_count();
    return transition[(static_cast<std::size_t>(s_next) * n_states + s) * na +
                      joint];
  }
};

// Per-player stationary policies; policies[i] has shape
// [n_states, action_counts[i]] with rows on the simplex.
struct PolicyProfile {
  std::vector<Matrix> policies;

  int n_players() const { return static_cast<int>(policies.size()); }
};

// Per-player occupancy measures; same shapes as PolicyProfile.
struct Occupancy {
  std::vector<Matrix> measures;
};

// Outcome of validate_spec / validate_profile: empty issue list means valid.
struct ValidationReport {
  std::vector<std::string> issues;

  bool ok() const { return issues.empty(); }
  std::string to_string() const;
};

// Checks every GameSpec invariant (shapes, stochasticity of transition
// columns to 1e-12, nonnegativity, mu0 on the simplex, gamma < 1) and lists
// all violations with tensor indices.
ValidationReport validate_spec(const GameSpec& spec);

// Checks profile shapes and row-stochasticity against the spec.
ValidationReport validate_profile(const GameSpec& spec,
                                  const PolicyProfile& profile);

// Throwing variants for call sites that cannot proceed on invalid input.
void check_spec(const GameSpec& spec);
void check_profile(const GameSpec& spec, const PolicyProfile& profile);

// Uniform policy for every player.
PolicyProfile uniform_profile(const GameSpec& spec);

}  // namespace cmg

#endif  // CMG_GAME_HPP_
