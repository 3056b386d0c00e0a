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

#ifndef CMG_LOGITS_HPP_
#define CMG_LOGITS_HPP_

#include <cstdint>
#include <vector>

#include "cmg/game.hpp"

namespace cmg {

// Unconstrained policy parameterization: per player a matrix of
// [n_states, action_counts[i] - 1] free logits; the last logit of every
// state is fixed at 0. to_policy is a softmax over the extended row, so
// policies are always strictly positive.
struct LogitProfile {
  std::vector<Matrix> logits;

  int n_players() const { return static_cast<int>(logits.size()); }
};

// All-zero logits, i.e. the uniform profile.
LogitProfile uniform_logits(const GameSpec& spec);

// Standard-normal logits drawn from a SplitMix64 stream.
LogitProfile gaussian_logits(const GameSpec& spec, std::uint64_t seed);

// Softmax over [logits, 0] per state. Throws NumericError on non-finite
// logits.
PolicyProfile to_policy(const LogitProfile& logits);

// Softmax for a single state row of free logits (length A-1), returning the
// full action distribution (length A).
Vector softmax_row(const Vector& free_logits);

// d softmax_row / d free logit y' applied as a direction: returns the full
// action-space perturbation pi .* (e_{y'} - pi(y')).
Vector softmax_row_jvp(const Vector& policy_row, int free_index);

}  // namespace cmg

#endif  // CMG_LOGITS_HPP_
