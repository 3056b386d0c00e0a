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

#ifndef CMG_OCCUPANCY_HPP_
#define CMG_OCCUPANCY_HPP_

#include <Eigen/Dense>
#include <vector>

#include "cmg/game.hpp"

namespace cmg {

// State transition matrix under a full profile; entry (s_next, s) is
// sum_a P(s_next | s, a) prod_j pi_j(a_j | s). Columns sum to 1.
using JointKernel = Matrix;

// Per-player kernel with opponents marginalized out. per_action[a] is the
// [s_next, s] matrix P_i^{pi_{-i}}(s_next | s, a).
struct MarginalKernel {
  std::vector<Matrix> per_action;

  int n_actions() const { return static_cast<int>(per_action.size()); }
};

// Coefficients of the Bellman flow equalities A mu = (1 - gamma) mu0 for one
// player. Columns are action-major: column a * n_states + s' corresponds to
// the occupancy cell mu(s', a), matching flatten_action_major below.
struct FlowMatrix {
  Matrix A;    // [n_states, n_states * n_actions]
  Vector rhs;  // (1 - gamma) mu0
};

// Flattens a [n_states, n_actions] matrix into the action-major vector laid
// out like FlowMatrix columns.
Vector flatten_action_major(const Matrix& m);
Matrix unflatten_action_major(const Vector& v, int n_states, int n_actions);

// Shared resolvent of one profile: P^pi, an LU factorization of
// (I - gamma P^pi), and the state occupancy. Built once and reused by
// everything that needs solves against the same profile.
struct Resolvent {
  Matrix kernel;                    // P^pi
  Eigen::PartialPivLU<Matrix> lu;   // of (I - gamma P^pi)
  Vector v;                         // (I - gamma P^pi)^{-1} mu0
  Vector state_occ;                 // (1 - gamma) v
};

JointKernel joint_kernel(const GameSpec& spec, const PolicyProfile& profile);

MarginalKernel marginal_kernel(const GameSpec& spec,
                               const PolicyProfile& profile, int player);

Resolvent make_resolvent(const GameSpec& spec, const PolicyProfile& profile);

// (1 - gamma) [I - gamma P^pi]^{-1} mu0.
Vector state_occupancy(const GameSpec& spec, const PolicyProfile& profile);

// mu_i(s, a) = state_occupancy(s) * pi_i(a | s), shape [n_states, n_actions].
Matrix player_occupancy(const GameSpec& spec, const PolicyProfile& profile,
                        int player);

FlowMatrix flow_matrix(const GameSpec& spec, const PolicyProfile& profile,
                       int player);

// Builds the flow matrix from an already-computed marginal kernel.
FlowMatrix flow_matrix_from_kernel(const GameSpec& spec,
                                   const MarginalKernel& kernel);

// Smallest singular value of A; positive iff A has full row rank.
double flow_matrix_smallest_singular_value(const FlowMatrix& flow);

// Recovers a policy from an occupancy slice. States with mass <= mass_floor
// get a uniform row.
Matrix policy_from_occupancy(const Matrix& mu, double mass_floor = 1e-12);

// Full derivative tensor d mu_i(x, y) / d pi_j(x', y'), stored flat with
// index (((x * A_i) + y) * n_states + x') * A_j + y'.
struct OccupancyDerivative {
  int n_states = 0;
  int n_actions_i = 0;
  int n_actions_j = 0;
  std::vector<double> values;

  double operator()(int x, int y, int xp, int yp) const {
    return values[((static_cast<std::size_t>(x) * n_actions_i + y) *
                       n_states +
                   xp) *
                      n_actions_j +
                  yp];
  }
};

// Analytic derivative of player i's occupancy with respect to player j's
// policy entries: a direct product-rule term when j == i plus the resolvent
// term gamma R (dP^pi) R mu0 scaled into occupancy units.
OccupancyDerivative d_occupancy_d_policy(const GameSpec& spec,
                                         const PolicyProfile& profile, int i,
                                         int j);

}  // namespace cmg

#endif  // CMG_OCCUPANCY_HPP_
