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

#include "cmg/solvers.hpp"

#include <chrono>
#include <cmath>

#include "cmg/exploitability.hpp"

namespace cmg {

namespace {

double elapsed_ms(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now() - start)
      .count();
}

}  // namespace

double anneal_step(const AnnealSchedule& schedule, const AnnealState& state) {
  if (schedule.type == AnnealType::kNone) return state.tau;
  if (state.iters_at_tau < schedule.min_iters_per_temp) return state.tau;
  if (!(state.last_loss <= schedule.loss_threshold)) return state.tau;

  double next = state.tau;
  switch (schedule.type) {
    case AnnealType::kType1:
      next = std::pow(10.0, -std::floor(static_cast<double>(state.t) /
                                        1000.0));
      break;
    case AnnealType::kType2:
      next = schedule.ratio * state.tau;
      break;
    case AnnealType::kType3: {
      const double denom = std::min(state.dloss_dtau, -state.last_loss);
      if (denom > -1e-12) return state.tau;  // degenerate; skip this anneal
      next = state.tau + 0.1 * state.last_loss / denom;
      break;
    }
    case AnnealType::kNone:
      break;
  }
  next = std::max(next, schedule.min_temperature);
  return std::min(next, state.tau);  // the temperature never rises
}

AdamOptimizer::AdamOptimizer(const AdamConfig& config,
                             const LogitProfile& shape)
    : config_(config) {
  m_.reserve(shape.n_players());
  v_.reserve(shape.n_players());
  for (const Matrix& logits : shape.logits) {
    m_.push_back(Matrix::Zero(logits.rows(), logits.cols()));
    v_.push_back(Matrix::Zero(logits.rows(), logits.cols()));
  }
}

void AdamOptimizer::step(LogitProfile* logits,
                         const std::vector<Matrix>& grads) {
  ++step_count_;
  const double bias1 = 1.0 - std::pow(config_.beta1, step_count_);
  const double bias2 = 1.0 - std::pow(config_.beta2, step_count_);
  for (std::size_t i = 0; i < grads.size(); ++i) {
    m_[i] = config_.beta1 * m_[i] + (1.0 - config_.beta1) * grads[i];
    v_[i] = config_.beta2 * v_[i].array().matrix() +
            (1.0 - config_.beta2) * grads[i].cwiseProduct(grads[i]);
    const Matrix m_hat = m_[i] / bias1;
    const Matrix v_hat = v_[i] / bias2;
    logits->logits[i].array() -=
        config_.lr * m_hat.array() / (v_hat.array().sqrt() + config_.epsilon);
  }
}

SolveResult pgl_minimize(const GameSpec& spec, const UtilitySpec& utilities,
                         const LogitProfile& init,
                         const SolveOptions& options) {
  check_spec(spec);
  check_utilities(spec, utilities);
  const auto start = std::chrono::steady_clock::now();

  SolveResult result;
  result.logits = init;
  AdamOptimizer adam(options.adam, init);

  double tau = options.schedule.initial_tau;
  int iters_at_tau = 0;
  double last_loss = 0.0;
  int events_since_eps = 0;

  const auto exact_epsilon = [&](const PolicyProfile& profile) {
    return exploitability(spec, utilities, profile, options.eps_tol, 0.0)
        .max_epsilon;
  };

  for (long t = 0; t < options.iterations; ++t) {
    if (t > 0) {
      AnnealState state{t, tau, iters_at_tau, last_loss, 0.0};
      if (options.schedule.type == AnnealType::kType3 &&
          iters_at_tau >= options.schedule.min_iters_per_temp &&
          last_loss <= options.schedule.loss_threshold) {
        // The schedule's derivative term is estimated by a forward
        // difference in tau at the current profile.
        const PolicyProfile profile = to_policy(result.logits);
        const double h = 1e-4 * tau;
        const double at_tau = pgl_loss(spec, utilities, profile, tau).loss;
        const double at_tau_h =
            pgl_loss(spec, utilities, profile, tau + h).loss;
        state.last_loss = at_tau;
        state.dloss_dtau = (at_tau_h - at_tau) / h;
      }
      const double next_tau = anneal_step(options.schedule, state);
      if (next_tau < tau) {
        result.trace.anneal_events.push_back(
            {t, tau, next_tau, state.last_loss});
        tau = next_tau;
        iters_at_tau = 0;
        if (options.eps_cadence > 0 &&
            ++events_since_eps >= options.eps_cadence) {
          events_since_eps = 0;
          TracePoint point{t, tau, last_loss, 0.0, std::nullopt,
                           elapsed_ms(start)};
          point.epsilon = exact_epsilon(to_policy(result.logits));
          result.trace.points.push_back(point);
        }
      }
    }

    LossGradient lg = pgl_loss_gradient(spec, utilities, result.logits, tau);
    last_loss = lg.report.loss;
    if (!std::isfinite(last_loss)) {
      result.aborted = true;
      break;
    }
    if (options.trace_stride > 0 && t % options.trace_stride == 0) {
      result.trace.points.push_back({t, tau, lg.report.loss, lg.report.bound,
                                     std::nullopt, elapsed_ms(start)});
    }
    adam.step(&result.logits, lg.logit_grads);
    ++iters_at_tau;
  }

  result.policy = to_policy(result.logits);
  result.adam_steps = adam.step_count();

  // Final trace row at t = iterations for the returned profile.
  const LossReport final_report =
      pgl_loss(spec, utilities, result.policy, tau);
  TracePoint final_point{options.iterations, tau, final_report.loss,
                         final_report.bound, std::nullopt, elapsed_ms(start)};
  if (options.eps_cadence > 0) {
    final_point.epsilon = exact_epsilon(result.policy);
  }
  result.trace.points.push_back(final_point);
  return result;
}

namespace {

SolveResult descent_common(const GameSpec& spec, const UtilitySpec& utilities,
                           const LogitProfile& init, double lr,
                           long iterations, double tau, int trace_stride,
                           bool round_robin) {
  check_spec(spec);
  check_utilities(spec, utilities);
  const auto start = std::chrono::steady_clock::now();

  SolveResult result;
  result.logits = init;

  std::vector<Matrix> policy_sum;
  long averaged = 0;

  for (long t = 0; t < iterations; ++t) {
    const PolicyProfile profile = to_policy(result.logits);

    if (trace_stride > 0 && t % trace_stride == 0) {
      const LossReport report = pgl_loss(spec, utilities, profile, tau);
      result.trace.points.push_back({t, tau, report.loss, report.bound,
                                     std::nullopt, elapsed_ms(start)});
    }

    if (round_robin) {
      const int player = static_cast<int>(t % spec.n_players);
      const Matrix grad = own_utility_logit_gradient(
          spec, utilities, result.logits, profile, player, tau);
      result.logits.logits[player] += lr * grad;  // ascent on own utility
    } else {
      std::vector<Matrix> grads(spec.n_players);
      for (int i = 0; i < spec.n_players; ++i) {
        grads[i] = own_utility_logit_gradient(spec, utilities, result.logits,
                                              profile, i, tau);
      }
      for (int i = 0; i < spec.n_players; ++i) {
        result.logits.logits[i] += lr * grads[i];
      }
    }

    if (!round_robin) {
      const PolicyProfile stepped = to_policy(result.logits);
      if (policy_sum.empty()) {
        for (const Matrix& pi : stepped.policies) policy_sum.push_back(pi);
      } else {
        for (int i = 0; i < spec.n_players; ++i) {
          policy_sum[i] += stepped.policies[i];
        }
      }
      ++averaged;
    }
  }

  if (!round_robin && averaged > 0) {
    PolicyProfile average;
    for (Matrix summed : policy_sum) {
      summed /= static_cast<double>(averaged);
      for (int s = 0; s < summed.rows(); ++s) {
        summed.row(s) /= summed.row(s).sum();
      }
      average.policies.push_back(std::move(summed));
    }
    result.policy = average;
  } else {
    result.policy = to_policy(result.logits);
  }

  const LossReport final_report =
      pgl_loss(spec, utilities, result.policy, tau);
  result.trace.points.push_back({iterations, tau, final_report.loss,
                                 final_report.bound, std::nullopt,
                                 elapsed_ms(start)});
  return result;
}

}  // namespace

SolveResult sim_descent(const GameSpec& spec, const UtilitySpec& utilities,
                        const LogitProfile& init, double lr, long iterations,
                        double tau, int trace_stride) {
  return descent_common(spec, utilities, init, lr, iterations, tau,
                        trace_stride, /*round_robin=*/false);
}

SolveResult rr_descent(const GameSpec& spec, const UtilitySpec& utilities,
                       const LogitProfile& init, double lr, long iterations,
                       double tau, int trace_stride) {
  return descent_common(spec, utilities, init, lr, iterations, tau,
                        trace_stride, /*round_robin=*/true);
}

}  // namespace cmg
