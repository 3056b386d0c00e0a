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

#include "cmg/occupancy.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <string>

namespace cmg {

Vector flatten_action_major(const Matrix& m) {
  const int ns = static_cast<int>(m.rows());
  const int na = static_cast<int>(m.cols());
  Vector v(ns * na);
  for (int a = 0; a < na; ++a) {
    v.segment(a * ns, ns) = m.col(a);
  }
  return v;
}

Matrix unflatten_action_major(const Vector& v, int n_states, int n_actions) {
  Matrix m(n_states, n_actions);
  for (int a = 0; a < n_actions; ++a) {
    m.col(a) = v.segment(a * n_states, n_states);
  }
  return m;
}

JointKernel joint_kernel(const GameSpec& spec, const PolicyProfile& profile) {
  check_profile(spec, profile);
  const int ns = spec.n_states;
  const int na_joint = spec.joint_action_count();
  Matrix kernel = Matrix::Zero(ns, ns);
  std::vector<int> actions(spec.n_players);
  for (int s = 0; s < ns; ++s) {
    for (int joint = 0; joint < na_joint; ++joint) {
      int rest = joint;
      for (int i = spec.n_players - 1; i >= 0; --i) {
        actions[i] = rest % spec.action_counts[i];
        rest /= spec.action_counts[i];
      }
      double weight = 1.0;
      for (int j = 0; j < spec.n_players; ++j) {
        weight *= profile.policies[j](s, actions[j]);
      }
      if (weight == 0.0) continue;
      for (int s_next = 0; s_next < ns; ++s_next) {
        kernel(s_next, s) += spec.transition_prob(s_next, s, joint) * weight;
      }
    }
  }
  return kernel;
}

MarginalKernel marginal_kernel(const GameSpec& spec,
                               const PolicyProfile& profile, int player) {
  if (player < 0 || player >= spec.n_players) {
    throw SpecError("player index out of range");
  }
  check_profile(spec, profile);
  const int ns = spec.n_states;
  const int na_joint = spec.joint_action_count();
  const int na = spec.action_counts[player];
  MarginalKernel kernel;
  kernel.per_action.assign(na, Matrix::Zero(ns, ns));
  std::vector<int> actions(spec.n_players);
  for (int s = 0; s < ns; ++s) {
    for (int joint = 0; joint < na_joint; ++joint) {
      int rest = joint;
      for (int i = spec.n_players - 1; i >= 0; --i) {
        actions[i] = rest % spec.action_counts[i];
        rest /= spec.action_counts[i];
      }
      double weight = 1.0;
      for (int j = 0; j < spec.n_players; ++j) {
        if (j == player) continue;
        weight *= profile.policies[j](s, actions[j]);
      }
      if (weight == 0.0) continue;
      Matrix& slice = kernel.per_action[actions[player]];
      for (int s_next = 0; s_next < ns; ++s_next) {
        slice(s_next, s) += spec.transition_prob(s_next, s, joint) * weight;
      }
    }
  }
  return kernel;
}

Resolvent make_resolvent(const GameSpec& spec, const PolicyProfile& profile) {
  Resolvent res;
  res.kernel = joint_kernel(spec, profile);
  const int ns = spec.n_states;
  Matrix system = Matrix::Identity(ns, ns) - spec.gamma * res.kernel;
  res.lu = Eigen::PartialPivLU<Matrix>(system);
  res.v = res.lu.solve(spec.mu0);
  if (!res.v.allFinite()) {
    throw NumericError("resolvent solve produced non-finite values");
  }
  res.state_occ = (1.0 - spec.gamma) * res.v;
  return res;
}

Vector state_occupancy(const GameSpec& spec, const PolicyProfile& profile) {
  return make_resolvent(spec, profile).state_occ;
}

Matrix player_occupancy(const GameSpec& spec, const PolicyProfile& profile,
                        int player) {
  const Vector occ = state_occupancy(spec, profile);
  const Matrix& pi = profile.policies[player];
  Matrix mu(spec.n_states, spec.action_counts[player]);
  for (int s = 0; s < spec.n_states; ++s) {
    mu.row(s) = occ[s] * pi.row(s);
  }
  return mu;
}

FlowMatrix flow_matrix_from_kernel(const GameSpec& spec,
                                   const MarginalKernel& kernel) {
  const int ns = spec.n_states;
  const int na = kernel.n_actions();
  FlowMatrix flow;
  flow.A = Matrix::Zero(ns, ns * na);
  for (int a = 0; a < na; ++a) {
    flow.A.block(0, a * ns, ns, ns) =
        Matrix::Identity(ns, ns) - spec.gamma * kernel.per_action[a];
  }
  flow.rhs = (1.0 - spec.gamma) * spec.mu0;
  return flow;
}

FlowMatrix flow_matrix(const GameSpec& spec, const PolicyProfile& profile,
                       int player) {
  return flow_matrix_from_kernel(spec, marginal_kernel(spec, profile, player));
}

double flow_matrix_smallest_singular_value(const FlowMatrix& flow) {
  Eigen::JacobiSVD<Matrix> svd(flow.A);
  return svd.singularValues().minCoeff();
}

Matrix policy_from_occupancy(const Matrix& mu, double mass_floor) {
  const int ns = static_cast<int>(mu.rows());
  const int na = static_cast<int>(mu.cols());
  Matrix policy(ns, na);
  for (int s = 0; s < ns; ++s) {
    const double mass = mu.row(s).sum();
    if (mass > mass_floor) {
      policy.row(s) = mu.row(s) / mass;
    } else {
      policy.row(s).setConstant(1.0 / na);
    }
  }
  return policy;
}

OccupancyDerivative d_occupancy_d_policy(const GameSpec& spec,
                                         const PolicyProfile& profile, int i,
                                         int j) {
  if (i < 0 || i >= spec.n_players || j < 0 || j >= spec.n_players) {
    throw SpecError("player index out of range");
  }
  const int ns = spec.n_states;
  const int na_i = spec.action_counts[i];
  const int na_j = spec.action_counts[j];

  const Resolvent res = make_resolvent(spec, profile);
  const MarginalKernel kernel_j = marginal_kernel(spec, profile, j);
  const Matrix& pi_i = profile.policies[i];

  OccupancyDerivative deriv;
  deriv.n_states = ns;
  deriv.n_actions_i = na_i;
  deriv.n_actions_j = na_j;
  deriv.values.assign(
      static_cast<std::size_t>(ns) * na_i * ns * na_j, 0.0);

  auto at = [&](int x, int y, int xp, int yp) -> double& {
    return deriv.values[(((static_cast<std::size_t>(x) * na_i) + y) * ns +
                         xp) *
                            na_j +
                        yp];
  };

  // Resolvent term: gamma * mu^s(x') * [R K_j(.|x', y')]_x * pi_i(y|x).
  // The kernel derivative has a single nonzero column at x', so one solve
  // per perturbed policy entry covers all (x, y).
  for (int xp = 0; xp < ns; ++xp) {
    for (int yp = 0; yp < na_j; ++yp) {
      const Vector column = kernel_j.per_action[yp].col(xp);
      const Vector propagated = res.lu.solve(column);
      const double scale = spec.gamma * res.state_occ[xp];
      for (int x = 0; x < ns; ++x) {
        const double base = scale * propagated[x];
        for (int y = 0; y < na_i; ++y) {
          at(x, y, xp, yp) = base * pi_i(x, y);
        }
      }
    }
  }

  // Direct product-rule term, present only for the player's own policy.
  if (i == j) {
    for (int x = 0; x < ns; ++x) {
      for (int y = 0; y < na_i; ++y) {
        at(x, y, x, y) += res.state_occ[x];
      }
    }
  }
  return deriv;
}

}  // namespace cmg
