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

#ifndef CMG_SOLVERS_HPP_
#define CMG_SOLVERS_HPP_

#include <cstdint>
#include <optional>
#include <vector>

#include "cmg/game.hpp"
#include "cmg/logits.hpp"
#include "cmg/pgl.hpp"
#include "cmg/utilities.hpp"

namespace cmg {

enum class AnnealType {
  kNone,   // temperature fixed at initial_tau for the whole run
  kType1,  // tau = 10^{-floor(t / 1000)}
  kType2,  // tau <- ratio * tau
  kType3,  // tau <- tau + (1/10) L / min(dL/dtau, -L)
};

struct AnnealSchedule {
  AnnealType type = AnnealType::kType1;
  double initial_tau = 1.0;
  double ratio = 0.8;              // Type 2
  double min_temperature = 1e-2;
  int min_iters_per_temp = 50;
  double loss_threshold = 1e-1;
};

// Inputs to one annealing decision.
struct AnnealState {
  long t = 0;               // global iteration index
  double tau = 1.0;         // current temperature
  int iters_at_tau = 0;     // iterations since the last temperature change
  double last_loss = 0.0;   // L^tau at the current profile
  double dloss_dtau = 0.0;  // finite-difference estimate, Type 3 only
};

// Applies the annealing gates (iters_at_tau >= min_iters_per_temp and
// last_loss <= loss_threshold), then the schedule's rule, then the minimum
// temperature clamp. Returns the (possibly unchanged) new temperature; the
// sequence is nonincreasing.
double anneal_step(const AnnealSchedule& schedule, const AnnealState& state);

struct AdamConfig {
  double lr = 0.1;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// Adam over per-player logit matrices. The state persists for the lifetime
// of the optimizer; annealing events never reset it.
class AdamOptimizer {
 public:
  AdamOptimizer(const AdamConfig& config, const LogitProfile& shape);

  // One descent step on `logits` along `grads`.
  void step(LogitProfile* logits, const std::vector<Matrix>& grads);

  long step_count() const { return step_count_; }
  const std::vector<Matrix>& first_moments() const { return m_; }

 private:
  AdamConfig config_;
  std::vector<Matrix> m_;
  std::vector<Matrix> v_;
  long step_count_ = 0;
};

struct TracePoint {
  long iter = 0;
  double tau = 0.0;
  double loss = 0.0;
  double bound = 0.0;
  std::optional<double> epsilon;
  double wallclock_ms = 0.0;
};

struct AnnealEvent {
  long iter = 0;
  double tau_before = 0.0;
  double tau_after = 0.0;
  double loss = 0.0;  // the gate guarantees loss <= loss_threshold here
};

struct RunTrace {
  std::vector<TracePoint> points;
  std::vector<AnnealEvent> anneal_events;
};

struct SolveOptions {
  long iterations = 8000;
  AdamConfig adam;
  AnnealSchedule schedule;
  int trace_stride = 10;
  // Exact-exploitability cadence: 0 disables it; k > 0 evaluates the oracle
  // at every k-th annealing event and at the final profile.
  int eps_cadence = 0;
  double eps_tol = 1e-6;
};

struct SolveResult {
  PolicyProfile policy;
  LogitProfile logits;
  RunTrace trace;
  bool aborted = false;   // non-finite loss encountered
  long adam_steps = 0;
};

// Algorithm: gradient descent on the projected-gradient loss over free
// logits with Adam, annealing tau per the schedule. Deterministic given the
// inputs; the Adam state persists across anneal events.
SolveResult pgl_minimize(const GameSpec& spec, const UtilitySpec& utilities,
                         const LogitProfile& init, const SolveOptions& options);

// Simultaneous gradient ascent of each player on their own utility at a
// fixed temperature; the returned policy is the uniform average of the
// policy iterates (row-renormalized).
SolveResult sim_descent(const GameSpec& spec, const UtilitySpec& utilities,
                        const LogitProfile& init, double lr, long iterations,
                        double tau = 0.0, int trace_stride = 10);

// Round-robin variant: players take turns, one gradient step per iteration.
// Returns the final policy (no averaging).
SolveResult rr_descent(const GameSpec& spec, const UtilitySpec& utilities,
                       const LogitProfile& init, double lr, long iterations,
                       double tau = 0.0, int trace_stride = 10);

}  // namespace cmg

#endif  // CMG_SOLVERS_HPP_
