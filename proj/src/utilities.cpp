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

#include "cmg/utilities.hpp"

#include <cmath>
#include <string>

namespace cmg {

namespace {

double effective_tau(double stored, bool annealed, double live_tau) {
  return annealed ? live_tau : stored;
}

// Argmax cell of |mu_marginal - target| with lowest-index tie breaking.
int infnorm_argmax(const Vector& marginal, const Vector& target,
                   double* deviation, double* sign) {
  int best = 0;
  double best_abs = -1.0;
  for (int k = 0; k < marginal.size(); ++k) {
    const double diff = marginal[k] - target[k];
    if (std::abs(diff) > best_abs) {
      best_abs = std::abs(diff);
      best = k;
      *sign = diff >= 0.0 ? 1.0 : -1.0;
    }
  }
  *deviation = best_abs;
  return best;
}

}  // namespace

void check_utilities(const GameSpec& spec, const UtilitySpec& utilities) {
  if (utilities.n_players() != spec.n_players) {
    throw SpecError("utilities list has " +
                    std::to_string(utilities.n_players()) +
                    " players, spec has " + std::to_string(spec.n_players));
  }
  const std::size_t reward_size =
      static_cast<std::size_t>(spec.n_states) * spec.joint_action_count();
  for (int i = 0; i < spec.n_players; ++i) {
    const int na = spec.action_counts[i];
    for (const UtilityTerm& term : utilities.player_terms[i]) {
      if (const auto* lin = std::get_if<LinearReward>(&term)) {
        if (lin->reward.size() != reward_size) {
          throw SpecError("linear reward tensor for player " +
                          std::to_string(i) + " has " +
                          std::to_string(lin->reward.size()) +
                          " entries, expected " + std::to_string(reward_size));
        }
      } else if (const auto* ent = std::get_if<EntropyBonus>(&term)) {
        if (ent->tau < 0.0) throw SpecError("entropy weight must be >= 0");
      } else if (const auto* kl = std::get_if<KLPenalty>(&term)) {
        if (kl->tau < 0.0) throw SpecError("KL weight must be >= 0");
        if (kl->mu_ref.rows() != spec.n_states || kl->mu_ref.cols() != na) {
          throw SpecError("KL reference shape mismatch for player " +
                          std::to_string(i));
        }
        if ((kl->mu_ref.array() <= 0.0).any()) {
          throw SpecError("KL reference must be strictly positive");
        }
      } else if (const auto* fair = std::get_if<FairnessPenalty>(&term)) {
        if (fair->weight < 0.0) throw SpecError("fairness weight must be >= 0");
        if (fair->s_plus < 0 || fair->s_plus >= spec.n_states ||
            fair->s_minus < 0 || fair->s_minus >= spec.n_states) {
          throw SpecError("fairness state index out of range");
        }
      } else if (const auto* hinge = std::get_if<HingePenalty>(&term)) {
        if (hinge->weight < 0.0) throw SpecError("hinge weight must be >= 0");
        if (hinge->state < 0 || hinge->state >= spec.n_states ||
            hinge->action < 0 || hinge->action >= na) {
          throw SpecError("hinge cell out of range");
        }
        if (hinge->threshold < 0.0 || hinge->threshold > 1.0) {
          throw SpecError("hinge threshold must lie in [0, 1]");
        }
      } else if (const auto* inf = std::get_if<InfNormSafety>(&term)) {
        if (inf->target_action.size() != na ||
            inf->target_state.size() != spec.n_states) {
          throw SpecError("inf-norm safety target shape mismatch");
        }
        if (inf->radius_action < 0.0 || inf->radius_state < 0.0) {
          throw SpecError("inf-norm safety radii must be >= 0");
        }
      }
    }
  }
}

Matrix expected_reward_vector(const GameSpec& spec,
                              const std::vector<double>& reward,
                              const PolicyProfile& profile, int player) {
  if (player < 0 || player >= spec.n_players) {
    throw SpecError("player index out of range");
  }
  const int ns = spec.n_states;
  const int na_joint = spec.joint_action_count();
  if (reward.size() != static_cast<std::size_t>(ns) * na_joint) {
    throw SpecError("reward tensor size mismatch");
  }
  Matrix r_vec = Matrix::Zero(ns, spec.action_counts[player]);
  std::vector<int> actions(spec.n_players);
  for (int s = 0; s < ns; ++s) {
    for (int joint = 0; joint < na_joint; ++joint) {
      int rest = joint;
      for (int i = spec.n_players - 1; i >= 0; --i) {
        actions[i] = rest % spec.action_counts[i];
        rest /= spec.action_counts[i];
      }
      double opponent_weight = 1.0;
      for (int j = 0; j < spec.n_players; ++j) {
        if (j == player) continue;
        opponent_weight *= profile.policies[j](s, actions[j]);
      }
      r_vec(s, actions[player]) +=
          reward[static_cast<std::size_t>(s) * na_joint + joint] *
          opponent_weight;
    }
  }
  return r_vec;
}

Matrix aggregate_reward_vector(const GameSpec& spec,
                               const UtilitySpec& utilities,
                               const PolicyProfile& profile, int player) {
  Matrix r_vec = Matrix::Zero(spec.n_states, spec.action_counts[player]);
  for (const UtilityTerm& term : utilities.player_terms[player]) {
    if (const auto* lin = std::get_if<LinearReward>(&term)) {
      r_vec += expected_reward_vector(spec, lin->reward, profile, player);
    }
  }
  return r_vec;
}

Matrix aggregate_reward_vector_jvp(const GameSpec& spec,
                                   const UtilitySpec& utilities,
                                   const PolicyProfile& profile, int player,
                                   int j, int state, const Vector& dpi_row) {
  Matrix dr = Matrix::Zero(spec.n_states, spec.action_counts[player]);
  if (j == player) return dr;  // own reward vector depends on opponents only
  const int na_joint = spec.joint_action_count();
  std::vector<int> actions(spec.n_players);
  for (const UtilityTerm& term : utilities.player_terms[player]) {
    const auto* lin = std::get_if<LinearReward>(&term);
    if (lin == nullptr) continue;
    for (int joint = 0; joint < na_joint; ++joint) {
      int rest = joint;
      for (int i = spec.n_players - 1; i >= 0; --i) {
        actions[i] = rest % spec.action_counts[i];
        rest /= spec.action_counts[i];
      }
      double weight = dpi_row[actions[j]];
      for (int l = 0; l < spec.n_players; ++l) {
        if (l == player || l == j) continue;
        weight *= profile.policies[l](state, actions[l]);
      }
      dr(state, actions[player]) +=
          lin->reward[static_cast<std::size_t>(state) * na_joint + joint] *
          weight;
    }
  }
  return dr;
}

double utility_value(const std::vector<UtilityTerm>& terms, const Matrix& mu,
                     const Matrix& r_vec, double tau) {
  double value = mu.cwiseProduct(r_vec).sum();
  for (const UtilityTerm& term : terms) {
    if (std::holds_alternative<LinearReward>(term)) continue;  // in r_vec
    if (const auto* ent = std::get_if<EntropyBonus>(&term)) {
      const double weight = effective_tau(ent->tau, ent->annealed, tau);
      if (weight == 0.0) continue;
      double entropy = 0.0;
      for (int s = 0; s < mu.rows(); ++s) {
        for (int a = 0; a < mu.cols(); ++a) {
          const double p = mu(s, a);
          if (p > 0.0) entropy -= p * std::log(p);
        }
      }
      value += weight * entropy;
    } else if (const auto* kl = std::get_if<KLPenalty>(&term)) {
      const double weight = effective_tau(kl->tau, kl->annealed, tau);
      if (weight == 0.0) continue;
      double divergence = 0.0;
      for (int s = 0; s < mu.rows(); ++s) {
        for (int a = 0; a < mu.cols(); ++a) {
          const double p = mu(s, a);
          if (p > 0.0) divergence += p * std::log(p / kl->mu_ref(s, a));
        }
      }
      value -= weight * divergence;
    } else if (const auto* fair = std::get_if<FairnessPenalty>(&term)) {
      const double delta =
          mu.row(fair->s_plus).sum() - mu.row(fair->s_minus).sum();
      value -= fair->weight * delta * delta;
    } else if (const auto* hinge = std::get_if<HingePenalty>(&term)) {
      const double overshoot = mu(hinge->state, hinge->action) -
                               hinge->threshold;
      if (overshoot > 0.0) value -= hinge->weight * overshoot;
    } else if (const auto* inf = std::get_if<InfNormSafety>(&term)) {
      const Vector action_marginal = mu.colwise().sum().transpose();
      const Vector state_marginal = mu.rowwise().sum();
      double deviation, sign;
      infnorm_argmax(action_marginal, inf->target_action, &deviation, &sign);
      if (deviation > inf->radius_action) {
        value -= deviation - inf->radius_action;
      }
      infnorm_argmax(state_marginal, inf->target_state, &deviation, &sign);
      if (deviation > inf->radius_state) {
        value -= deviation - inf->radius_state;
      }
    }
  }
  return value;
}

Matrix utility_gradient(const std::vector<UtilityTerm>& terms,
                        const Matrix& mu, const Matrix& r_vec, double tau) {
  Matrix grad = r_vec;
  for (const UtilityTerm& term : terms) {
    if (std::holds_alternative<LinearReward>(term)) continue;
    if (const auto* ent = std::get_if<EntropyBonus>(&term)) {
      const double weight = effective_tau(ent->tau, ent->annealed, tau);
      if (weight == 0.0) continue;
      grad.array() += weight * (-mu.array().log() - 1.0);
    } else if (const auto* kl = std::get_if<KLPenalty>(&term)) {
      const double weight = effective_tau(kl->tau, kl->annealed, tau);
      if (weight == 0.0) continue;
      grad.array() -=
          weight * ((mu.array() / kl->mu_ref.array()).log() + 1.0);
    } else if (const auto* fair = std::get_if<FairnessPenalty>(&term)) {
      const double delta =
          mu.row(fair->s_plus).sum() - mu.row(fair->s_minus).sum();
      grad.row(fair->s_plus).array() -= 2.0 * fair->weight * delta;
      grad.row(fair->s_minus).array() += 2.0 * fair->weight * delta;
    } else if (const auto* hinge = std::get_if<HingePenalty>(&term)) {
      if (mu(hinge->state, hinge->action) > hinge->threshold) {
        grad(hinge->state, hinge->action) -= hinge->weight;
      }
    } else if (const auto* inf = std::get_if<InfNormSafety>(&term)) {
      const Vector action_marginal = mu.colwise().sum().transpose();
      const Vector state_marginal = mu.rowwise().sum();
      double deviation, sign;
      int cell =
          infnorm_argmax(action_marginal, inf->target_action, &deviation,
                         &sign);
      if (deviation > inf->radius_action) grad.col(cell).array() -= sign;
      cell = infnorm_argmax(state_marginal, inf->target_state, &deviation,
                            &sign);
      if (deviation > inf->radius_state) grad.row(cell).array() -= sign;
    }
  }
  return grad;
}

Matrix utility_gradient_jvp(const std::vector<UtilityTerm>& terms,
                            const Matrix& mu, const Matrix& dmu,
                            const Matrix& dr_vec, double tau) {
  Matrix dgrad = dr_vec;
  for (const UtilityTerm& term : terms) {
    if (const auto* ent = std::get_if<EntropyBonus>(&term)) {
      const double weight = effective_tau(ent->tau, ent->annealed, tau);
      if (weight == 0.0) continue;
      dgrad.array() -= weight * dmu.array() / mu.array();
    } else if (const auto* kl = std::get_if<KLPenalty>(&term)) {
      const double weight = effective_tau(kl->tau, kl->annealed, tau);
      if (weight == 0.0) continue;
      dgrad.array() -= weight * dmu.array() / mu.array();
    } else if (const auto* fair = std::get_if<FairnessPenalty>(&term)) {
      const double ddelta =
          dmu.row(fair->s_plus).sum() - dmu.row(fair->s_minus).sum();
      dgrad.row(fair->s_plus).array() -= 2.0 * fair->weight * ddelta;
      dgrad.row(fair->s_minus).array() += 2.0 * fair->weight * ddelta;
    }
    // Hinge and inf-norm terms are piecewise constant in the gradient.
  }
  return dgrad;
}

bool has_nonlinear_terms(const std::vector<UtilityTerm>& terms, double tau) {
  for (const UtilityTerm& term : terms) {
    if (const auto* ent = std::get_if<EntropyBonus>(&term)) {
      if (effective_tau(ent->tau, ent->annealed, tau) != 0.0) return true;
    } else if (const auto* kl = std::get_if<KLPenalty>(&term)) {
      if (effective_tau(kl->tau, kl->annealed, tau) != 0.0) return true;
    } else if (const auto* fair = std::get_if<FairnessPenalty>(&term)) {
      if (fair->weight != 0.0) return true;
    } else if (const auto* hinge = std::get_if<HingePenalty>(&term)) {
      if (hinge->weight != 0.0) return true;
    } else if (std::holds_alternative<InfNormSafety>(term)) {
      return true;
    }
  }
  return false;
}

}  // namespace cmg
