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

#include "cmg/game.hpp"

#include <cmath>
#include <sstream>

namespace cmg {

namespace {
constexpr double kStochasticTol = 1e-12;
}  // namespace

int GameSpec::joint_action_count() const {
  int count = 1;
  for (int a : action_counts) count *= a;
  return count;
}

int GameSpec::joint_index(const std::vector<int>& actions) const {
  int index = 0;
  for (int i = 0; i < n_players; ++i) {
    index = index * action_counts[i] + actions[i];
  }
  return index;
}

std::vector<int> GameSpec::joint_actions(int joint) const {
  std::vector<int> actions(n_players);
  for (int i = n_players - 1; i >= 0; --i) {
    actions[i] = joint % action_counts[i];
    joint /= action_counts[i];
  }
  return actions;
}

std::string ValidationReport::to_string() const {
  if (ok()) return "valid";
  std::ostringstream out;
  for (std::size_t i = 0; i < issues.size(); ++i) {
    if (i > 0) out << "\n";
    out << issues[i];
  }
  return out.str();
}

ValidationReport validate_spec(const GameSpec& spec) {
  ValidationReport report;
  auto add = [&report](const std::string& message) {
    report.issues.push_back(message);
  };

  if (spec.n_players <= 0) add("n_players must be positive");
  if (spec.n_states <= 0) add("n_states must be positive");
  if (static_cast<int>(spec.action_counts.size()) != spec.n_players) {
    add("action_counts size does not match n_players");
  }
  for (std::size_t i = 0; i < spec.action_counts.size(); ++i) {
    if (spec.action_counts[i] <= 0) {
      add("action count for player " + std::to_string(i) +
          " must be positive");
    }
  }
  if (!(spec.gamma >= 0.0)) add("gamma must be nonnegative");
  if (!(spec.gamma < 1.0)) add("gamma strictly less than 1");

  if (spec.n_players <= 0 || spec.n_states <= 0 ||
      static_cast<int>(spec.action_counts.size()) != spec.n_players) {
    return report;  // remaining checks need consistent shapes
  }

  const int ns = spec.n_states;
  const int na = spec.joint_action_count();
  const std::size_t expected =
      static_cast<std::size_t>(ns) * ns * static_cast<std::size_t>(na);
  if (spec.transition.size() != expected) {
    add("transition tensor has " + std::to_string(spec.transition.size()) +
        " entries, expected " + std::to_string(expected));
    return report;
  }

  if (spec.mu0.size() != ns) {
    add("mu0 has " + std::to_string(spec.mu0.size()) + " entries, expected " +
        std::to_string(ns));
  } else {
    double total = 0.0;
    for (int s = 0; s < ns; ++s) {
      if (spec.mu0[s] < 0.0) {
        add("mu0[" + std::to_string(s) + "] is negative");
      }
      total += spec.mu0[s];
    }
    if (std::abs(total - 1.0) > kStochasticTol) {
      add("mu0 sums to " + std::to_string(total) + ", expected 1");
    }
  }

  for (int s = 0; s < ns; ++s) {
    for (int joint = 0; joint < na; ++joint) {
      double column = 0.0;
      for (int s_next = 0; s_next < ns; ++s_next) {
        const double p = spec.transition_prob(s_next, s, joint);
        if (p < 0.0) {
          add("transition[s_next=" + std::to_string(s_next) +
              ", s=" + std::to_string(s) +
              ", joint=" + std::to_string(joint) + "] is negative");
        }
        column += p;
      }
      if (std::abs(column - 1.0) > kStochasticTol) {
        add("transition column (s=" + std::to_string(s) +
            ", joint=" + std::to_string(joint) + ") sums to " +
            std::to_string(column) + ", expected 1");
      }
    }
  }
  return report;
}

ValidationReport validate_profile(const GameSpec& spec,
                                  const PolicyProfile& profile) {
  ValidationReport report;
  auto add = [&report](const std::string& message) {
    report.issues.push_back(message);
  };

  if (profile.n_players() != spec.n_players) {
    add("profile has " + std::to_string(profile.n_players()) +
        " players, spec has " + std::to_string(spec.n_players));
    return report;
  }
  for (int i = 0; i < spec.n_players; ++i) {
    const Matrix& pi = profile.policies[i];
    if (pi.rows() != spec.n_states || pi.cols() != spec.action_counts[i]) {
      add("policy " + std::to_string(i) + " has shape " +
          std::to_string(pi.rows()) + "x" + std::to_string(pi.cols()) +
          ", expected " + std::to_string(spec.n_states) + "x" +
          std::to_string(spec.action_counts[i]));
      continue;
    }
    for (int s = 0; s < spec.n_states; ++s) {
      double row = 0.0;
      for (int a = 0; a < pi.cols(); ++a) {
        if (pi(s, a) < 0.0) {
          add("policy " + std::to_string(i) + " entry (s=" +
              std::to_string(s) + ", a=" + std::to_string(a) +
              ") is negative");
        }
        row += pi(s, a);
      }
      if (std::abs(row - 1.0) > kStochasticTol) {
        add("policy " + std::to_string(i) + " row s=" + std::to_string(s) +
            " sums to " + std::to_string(row));
      }
    }
  }
  return report;
}

void check_spec(const GameSpec& spec) {
  const ValidationReport report = validate_spec(spec);
  if (!report.ok()) throw SpecError("invalid GameSpec:\n" + report.to_string());
}

void check_profile(const GameSpec& spec, const PolicyProfile& profile) {
  const ValidationReport report = validate_profile(spec, profile);
  if (!report.ok()) {
    throw SpecError("invalid PolicyProfile:\n" + report.to_string());
  }
}

PolicyProfile uniform_profile(const GameSpec& spec) {
  PolicyProfile profile;
  profile.policies.reserve(spec.n_players);
  for (int i = 0; i < spec.n_players; ++i) {
    const int na = spec.action_counts[i];
    profile.policies.push_back(
        Matrix::Constant(spec.n_states, na, 1.0 / na));
  }
  return profile;
}

}  // namespace cmg
