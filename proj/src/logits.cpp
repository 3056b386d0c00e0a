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

#include "cmg/logits.hpp"

#include <cmath>

#include "cmg/rng.hpp"

namespace cmg {

LogitProfile uniform_logits(const GameSpec& spec) {
  LogitProfile profile;
  profile.logits.reserve(spec.n_players);
  for (int i = 0; i < spec.n_players; ++i) {
    profile.logits.push_back(
        Matrix::Zero(spec.n_states, spec.action_counts[i] - 1));
  }
  return profile;
}

LogitProfile gaussian_logits(const GameSpec& spec, std::uint64_t seed) {
  SplitMix64 rng(seed);
  LogitProfile profile;
  profile.logits.reserve(spec.n_players);
  for (int i = 0; i < spec.n_players; ++i) {
    Matrix logits(spec.n_states, spec.action_counts[i] - 1);
    for (int s = 0; s < logits.rows(); ++s) {
      for (int a = 0; a < logits.cols(); ++a) {
        logits(s, a) = rng.next_gaussian();
      }
    }
    profile.logits.push_back(std::move(logits));
  }
  return profile;
}

Vector softmax_row(const Vector& free_logits) {
  const int n = static_cast<int>(free_logits.size()) + 1;
  Vector extended(n);
  extended.head(n - 1) = free_logits;
  extended[n - 1] = 0.0;
  const double max_logit = extended.maxCoeff();
  Vector probs = (extended.array() - max_logit).exp();
  probs /= probs.sum();
  return probs;
}

Vector softmax_row_jvp(const Vector& policy_row, int free_index) {
  Vector d = -policy_row[free_index] * policy_row;
  d[free_index] += policy_row[free_index];
  return d;
}

PolicyProfile to_policy(const LogitProfile& logits) {
  PolicyProfile profile;
  profile.policies.reserve(logits.n_players());
  for (const Matrix& player_logits : logits.logits) {
    if (!player_logits.allFinite()) {
      throw NumericError("non-finite logits");
    }
    Matrix policy(player_logits.rows(), player_logits.cols() + 1);
    for (int s = 0; s < player_logits.rows(); ++s) {
      policy.row(s) =
          softmax_row(player_logits.row(s).transpose()).transpose();
    }
    profile.policies.push_back(std::move(policy));
  }
  return profile;
}

}  // namespace cmg
