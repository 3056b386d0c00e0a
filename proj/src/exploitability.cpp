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

#include "cmg/exploitability.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "cmg/occupancy.hpp"

namespace cmg {

namespace {

constexpr double kValueIterationResidual = 1e-12;
constexpr long kValueIterationMaxSweeps = 200000;
constexpr double kGradientClampFloor = 1e-12;

// Golden-section search for a unimodal function on [lo, hi]. Returns the
// argmax; `evals` controls the bracketing precision.
double golden_section_max(const std::function<double(double)>& f, double lo,
                          double hi, int evals) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < evals; ++it) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = f(x1);
    }
  }
  return (a + b) / 2.0;
}

// Detects the piecewise-linear single-hinge case where the dual certificate
// below is exact: only linear terms plus one active hinge (annealed terms
// must be off at the evaluation temperature).
const HingePenalty* single_hinge_linear(const std::vector<UtilityTerm>& terms,
                                        double tau) {
  const HingePenalty* hinge = nullptr;
  for (const UtilityTerm& term : terms) {
    if (std::holds_alternative<LinearReward>(term)) continue;
    if (const auto* ent = std::get_if<EntropyBonus>(&term)) {
      if ((ent->annealed ? tau : ent->tau) != 0.0) return nullptr;
    } else if (const auto* kl = std::get_if<KLPenalty>(&term)) {
      if ((kl->annealed ? tau : kl->tau) != 0.0) return nullptr;
    } else if (const auto* fair = std::get_if<FairnessPenalty>(&term)) {
      if (fair->weight != 0.0) return nullptr;
    } else if (const auto* h = std::get_if<HingePenalty>(&term)) {
      if (h->weight == 0.0) continue;
      if (hinge != nullptr) return nullptr;
      hinge = h;
    } else {
      return nullptr;
    }
  }
  return hinge;
}

}  // namespace

Matrix linear_best_response(const GameSpec& spec, const PolicyProfile& profile,
                            int player, const Matrix& reward_vec) {
  const int ns = spec.n_states;
  const int na = spec.action_counts[player];
  if (reward_vec.rows() != ns || reward_vec.cols() != na) {
    throw SpecError("reward vector shape mismatch");
  }
  const MarginalKernel kernel = marginal_kernel(spec, profile, player);

  Vector values = Vector::Zero(ns);
  Matrix q(ns, na);
  for (long sweep = 0; sweep < kValueIterationMaxSweeps; ++sweep) {
    for (int a = 0; a < na; ++a) {
      q.col(a) = reward_vec.col(a) +
                 spec.gamma * (kernel.per_action[a].transpose() * values);
    }
    const Vector updated = q.rowwise().maxCoeff();
    const double residual = (updated - values).cwiseAbs().maxCoeff();
    values = updated;
    if (residual <= kValueIterationResidual) break;
  }

  // Greedy deterministic policy, ties to the lowest action index.
  Matrix greedy = Matrix::Zero(ns, na);
  for (int s = 0; s < ns; ++s) {
    int best = 0;
    for (int a = 1; a < na; ++a) {
      if (q(s, a) > q(s, best)) best = a;
    }
    greedy(s, best) = 1.0;
  }

  PolicyProfile deviated = profile;
  deviated.policies[player] = greedy;
  return player_occupancy(spec, deviated, player);
}

BestResponseResult best_response(const GameSpec& spec,
                                 const UtilitySpec& utilities,
                                 const PolicyProfile& profile, int player,
                                 double tol, long max_iters, double tau) {
  if (tol <= 0.0) throw SpecError("best_response tolerance must be positive");
  const std::vector<UtilityTerm>& terms = utilities.player_terms[player];
  const Matrix r_vec = aggregate_reward_vector(spec, utilities, profile,
                                               player);
  const auto value = [&](const Matrix& m) {
    return utility_value(terms, m, r_vec, tau);
  };

  Matrix mu = player_occupancy(spec, profile, player);
  BestResponseResult result;
  result.mu = mu;
  result.utility = value(mu);
  double current_value = result.utility;
  double min_gap = std::numeric_limits<double>::infinity();

  for (long k = 0; k < max_iters; ++k) {
    // Entropy/KL gradients blow up at the boundary; clamp the gradient
    // argument only.
    const Matrix g = utility_gradient(terms, mu.cwiseMax(kGradientClampFloor),
                                      r_vec, tau);
    const Matrix vertex = linear_best_response(spec, profile, player, g);
    const Matrix direction = vertex - mu;
    const double gap = direction.cwiseProduct(g).sum();
    min_gap = std::min(min_gap, gap);
    if (min_gap <= tol) {
      result.certified = true;
      break;
    }

    const auto along = [&](double eta) { return value(mu + eta * direction); };
    const double eta_golden = golden_section_max(along, 0.0, 1.0, 60);
    double eta = 2.0 / (k + 2.0);
    double stepped = along(eta);
    for (double candidate : {eta_golden, 1.0}) {
      const double candidate_value = along(candidate);
      if (candidate_value > stepped) {
        stepped = candidate_value;
        eta = candidate;
      }
    }
    if (stepped <= current_value && gap > tol) {
      // Stalled along the Frank-Wolfe direction (can happen at kinks of
      // nonsmooth terms); leave the loop and rely on the dual certificate.
      result.iterations = k;
      break;
    }
    mu += eta * direction;
    current_value = stepped;
    if (current_value > result.utility) {
      result.utility = current_value;
      result.mu = mu;
    }
    result.iterations = k + 1;
  }

  // For linear-plus-one-hinge utilities the certificate can be tightened
  // exactly: max_mu min_lambda of the hinge's linearizations equals
  // min_lambda max_mu, and each inner max is one MDP solve.
  if (!result.certified) {
    if (const HingePenalty* hinge = single_hinge_linear(terms, tau)) {
      const auto dual_value = [&](double lambda) {
        Matrix adjusted = r_vec;
        adjusted(hinge->state, hinge->action) -= lambda * hinge->weight;
        const Matrix best_mu =
            linear_best_response(spec, profile, player, adjusted);
        return adjusted.cwiseProduct(best_mu).sum() +
               lambda * hinge->weight * hinge->threshold;
      };
      double dual_best = std::min(dual_value(0.0), dual_value(1.0));
      const double lambda_star = golden_section_max(
          [&](double lambda) { return -dual_value(lambda); }, 0.0, 1.0, 60);
      dual_best = std::min(dual_best, dual_value(lambda_star));
      min_gap = std::min(min_gap, std::max(dual_best - result.utility, 0.0));
      if (min_gap <= tol) result.certified = true;
    }
  }

  result.gap = min_gap;
  return result;
}

ExploitabilityReport exploitability(const GameSpec& spec,
                                    const UtilitySpec& utilities,
                                    const PolicyProfile& profile, double tol,
                                    double tau) {
  check_profile(spec, profile);
  check_utilities(spec, utilities);
  ExploitabilityReport report;
  report.per_player.resize(spec.n_players);
  report.certified = true;
  for (int i = 0; i < spec.n_players; ++i) {
    const BestResponseResult br =
        best_response(spec, utilities, profile, i, tol, 100000, tau);
    const Matrix own = player_occupancy(spec, profile, i);
    const Matrix r_vec = aggregate_reward_vector(spec, utilities, profile, i);
    const double current =
        utility_value(utilities.player_terms[i], own, r_vec, tau);
    report.per_player[i] = std::max(br.utility - current, 0.0);
    report.certified = report.certified && br.certified;
    report.max_epsilon = std::max(report.max_epsilon, report.per_player[i]);
  }
  return report;
}

PerStateExploitability per_state_exploitability(const GameSpec& spec,
                                                const UtilitySpec& utilities,
                                                const PolicyProfile& profile,
                                                double tol, double tau) {
  PerStateExploitability result;
  result.certified = true;
  GameSpec pointed = spec;
  for (int s = 0; s < spec.n_states; ++s) {
    pointed.mu0 = Vector::Zero(spec.n_states);
    pointed.mu0[s] = 1.0;
    const ExploitabilityReport report =
        exploitability(pointed, utilities, profile, tol, tau);
    result.per_state.push_back(report.max_epsilon);
    result.per_state_per_player.push_back(report.per_player);
    result.certified = result.certified && report.certified;
    result.max_epsilon = std::max(result.max_epsilon, report.max_epsilon);
  }
  return result;
}

}  // namespace cmg
