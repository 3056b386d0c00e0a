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

#include "cmg/pgl.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <string>

namespace cmg {

namespace {

constexpr double kSingularEigenvalueFloor = 1e-14;

// Everything pgl_loss computes that the gradient reuses.
struct PlayerWorkspace {
  MarginalKernel kernel;
  Matrix mu;         // [S, A_i]
  Matrix r_vec;      // [S, A_i]
  Matrix grad;       // utility gradient at mu, [S, A_i]
  Matrix A;          // flow matrix, [S, S*A_i]
  Eigen::LLT<Matrix> gram_llt;  // of A A^T
  Matrix projector;  // Pi, [S*A_i, S*A_i]
  Vector projected;  // Pi g (action-major)
  double norm = 0.0;
};

struct LossWorkspace {
  PolicyProfile profile;
  Resolvent resolvent;
  std::vector<PlayerWorkspace> players;
  LossReport report;
};

Eigen::LLT<Matrix> factor_gram(const Matrix& A) {
  const Matrix gram = A * A.transpose();
  Eigen::SelfAdjointEigenSolver<Matrix> eigs(gram,
                                             Eigen::EigenvaluesOnly);
  const double smallest = eigs.eigenvalues().minCoeff();
  if (smallest < kSingularEigenvalueFloor) {
    throw NumericError(
        "flow matrix gram A A^T is near-singular (smallest eigenvalue " +
        std::to_string(smallest) + "); cannot form tangent projection");
  }
  Eigen::LLT<Matrix> llt(gram);
  if (llt.info() != Eigen::Success) {
    throw NumericError("Cholesky factorization of A A^T failed");
  }
  return llt;
}

LossWorkspace build_workspace(const GameSpec& spec,
                              const UtilitySpec& utilities,
                              const PolicyProfile& profile, double tau) {
  LossWorkspace ws;
  ws.profile = profile;
  ws.resolvent = make_resolvent(spec, profile);
  ws.players.resize(spec.n_players);
  ws.report.tau = tau;
  ws.report.player_norms.resize(spec.n_players);

  double loss = 0.0;
  for (int i = 0; i < spec.n_players; ++i) {
    PlayerWorkspace& pw = ws.players[i];
    pw.kernel = marginal_kernel(spec, profile, i);
    pw.mu = Matrix(spec.n_states, spec.action_counts[i]);
    for (int s = 0; s < spec.n_states; ++s) {
      pw.mu.row(s) = ws.resolvent.state_occ[s] * profile.policies[i].row(s);
    }
    pw.r_vec = aggregate_reward_vector(spec, utilities, profile, i);
    pw.grad = utility_gradient(utilities.player_terms[i], pw.mu, pw.r_vec,
                               tau);
    const FlowMatrix flow = flow_matrix_from_kernel(spec, pw.kernel);
    pw.A = flow.A;
    pw.gram_llt = factor_gram(pw.A);
    const int dim = static_cast<int>(pw.A.cols());
    pw.projector = Matrix::Identity(dim, dim) -
                   pw.A.transpose() * pw.gram_llt.solve(pw.A);
    pw.projected = pw.projector * flatten_action_major(pw.grad);
    pw.norm = pw.projected.norm();
    ws.report.player_norms[i] = pw.norm;
    loss += pw.norm * pw.norm;
  }
  ws.report.loss = loss;

  int max_actions = 0;
  for (int a : spec.action_counts) max_actions = std::max(max_actions, a);
  ws.report.bound = tau * std::log(static_cast<double>(spec.n_states) *
                                   max_actions) +
                    std::sqrt(2.0 * spec.n_players * loss);
  return ws;
}

}  // namespace

Matrix tangent_projection(const FlowMatrix& flow) {
  const Eigen::LLT<Matrix> llt = factor_gram(flow.A);
  const int dim = static_cast<int>(flow.A.cols());
  return Matrix::Identity(dim, dim) -
         flow.A.transpose() * llt.solve(flow.A);
}

LossReport pgl_loss(const GameSpec& spec, const UtilitySpec& utilities,
                    const PolicyProfile& profile, double tau) {
  return build_workspace(spec, utilities, profile, tau).report;
}

LossGradient pgl_loss_gradient(const GameSpec& spec,
                               const UtilitySpec& utilities,
                               const LogitProfile& logits, double tau) {
  const PolicyProfile profile = to_policy(logits);
  LossWorkspace ws = build_workspace(spec, utilities, profile, tau);
  const int ns = spec.n_states;

  LossGradient result;
  result.report = ws.report;
  result.logit_grads.reserve(spec.n_players);
  for (int j = 0; j < spec.n_players; ++j) {
    result.logit_grads.push_back(
        Matrix::Zero(ns, spec.action_counts[j] - 1));
  }

  std::vector<int> opp_actions(spec.n_players);

  // Directional derivative of the loss for each free logit (j, xp, yp).
  for (int j = 0; j < spec.n_players; ++j) {
    const int na_j = spec.action_counts[j];
    for (int xp = 0; xp < ns; ++xp) {
      for (int yp = 0; yp < na_j - 1; ++yp) {
        const Vector dpi_row = softmax_row_jvp(
            profile.policies[j].row(xp).transpose(), yp);

        // dP^pi has a single nonzero column at xp.
        Vector dp_col = Vector::Zero(ns);
        for (int a = 0; a < na_j; ++a) {
          dp_col += dpi_row[a] * ws.players[j].kernel.per_action[a].col(xp);
        }
        const Vector dv =
            spec.gamma * ws.resolvent.v[xp] * ws.resolvent.lu.solve(dp_col);
        const Vector dstate_occ = (1.0 - spec.gamma) * dv;

        double dloss = 0.0;
        for (int i = 0; i < spec.n_players; ++i) {
          const PlayerWorkspace& pw = ws.players[i];
          const int na_i = spec.action_counts[i];

          Matrix dmu(ns, na_i);
          for (int s = 0; s < ns; ++s) {
            dmu.row(s) = dstate_occ[s] * profile.policies[i].row(s);
          }
          if (i == j) {
            dmu.row(xp) +=
                ws.resolvent.state_occ[xp] * dpi_row.transpose();
          }

          Matrix dr_vec;
          if (i == j) {
            dr_vec = Matrix::Zero(ns, na_i);
          } else {
            dr_vec = aggregate_reward_vector_jvp(spec, utilities, profile, i,
                                                 j, xp, dpi_row);
          }
          const Matrix dgrad = utility_gradient_jvp(
              utilities.player_terms[i], pw.mu, dmu, dr_vec, tau);

          Vector dprojected = pw.projector * flatten_action_major(dgrad);

          if (i != j) {
            // The flow matrix depends on the opponents' policies; its
            // perturbation D is nonzero only in the columns of from-state xp.
            Matrix D = Matrix::Zero(ns, ns * na_i);
            for (int a = 0; a < na_i; ++a) {
              Vector dk_col = Vector::Zero(ns);
              for (int joint = 0; joint < spec.joint_action_count();
                   ++joint) {
                int rest = joint;
                for (int p = spec.n_players - 1; p >= 0; --p) {
                  opp_actions[p] = rest % spec.action_counts[p];
                  rest /= spec.action_counts[p];
                }
                if (opp_actions[i] != a) continue;
                double weight = dpi_row[opp_actions[j]];
                for (int l = 0; l < spec.n_players; ++l) {
                  if (l == i || l == j) continue;
                  weight *= profile.policies[l](xp, opp_actions[l]);
                }
                if (weight == 0.0) continue;
                for (int s_next = 0; s_next < ns; ++s_next) {
                  dk_col[s_next] +=
                      spec.transition_prob(s_next, xp, joint) * weight;
                }
              }
              D.col(a * ns + xp) = -spec.gamma * dk_col;
            }

            // d(Pi) g = -(D^T Mz + A^T dM (A g) + A^T M (D g)) with
            // M = (A A^T)^{-1} and dM = -M (D A^T + A D^T) M.
            const Vector g_flat = flatten_action_major(pw.grad);
            const Vector Ag = pw.A * g_flat;
            const Vector MAg = pw.gram_llt.solve(Ag);
            const Vector dM_Ag = -pw.gram_llt.solve(
                D * (pw.A.transpose() * MAg) + pw.A * (D.transpose() * MAg));
            const Vector dPi_g =
                -(D.transpose() * MAg + pw.A.transpose() * dM_Ag +
                  pw.A.transpose() * pw.gram_llt.solve(D * g_flat));
            dprojected += dPi_g;
          }

          dloss += 2.0 * pw.projected.dot(dprojected);
        }
        result.logit_grads[j](xp, yp) = dloss;
      }
    }
  }
  return result;
}

Matrix own_utility_logit_gradient(const GameSpec& spec,
                                  const UtilitySpec& utilities,
                                  const LogitProfile& logits,
                                  const PolicyProfile& profile, int player,
                                  double tau) {
  const int ns = spec.n_states;
  const int na = spec.action_counts[player];
  const Resolvent res = make_resolvent(spec, profile);
  const MarginalKernel kernel = marginal_kernel(spec, profile, player);

  Matrix mu(ns, na);
  for (int s = 0; s < ns; ++s) {
    mu.row(s) = res.state_occ[s] * profile.policies[player].row(s);
  }
  const Matrix r_vec = aggregate_reward_vector(spec, utilities, profile,
                                               player);
  const Matrix grad = utility_gradient(utilities.player_terms[player], mu,
                                       r_vec, tau);

  // Reverse-mode through the occupancy map: with w(s) = <grad(s,.), pi(s,.)>,
  // du/dpi(xp, yp) = grad(xp, yp) mu^s(xp)
  //                + gamma mu^s(xp) <R^T w, K(.|xp, yp)>.
  Vector w(ns);
  for (int s = 0; s < ns; ++s) {
    w[s] = grad.row(s).dot(profile.policies[player].row(s));
  }
  const Vector rt_w = res.lu.transpose().solve(w);

  Matrix dpi(ns, na);
  for (int xp = 0; xp < ns; ++xp) {
    for (int yp = 0; yp < na; ++yp) {
      dpi(xp, yp) = grad(xp, yp) * res.state_occ[xp] +
                    spec.gamma * res.state_occ[xp] *
                        rt_w.dot(kernel.per_action[yp].col(xp));
    }
  }

  // Chain through the softmax rows.
  Matrix dlogits(ns, na - 1);
  for (int s = 0; s < ns; ++s) {
    const Vector policy_row = profile.policies[player].row(s).transpose();
    for (int y = 0; y < na - 1; ++y) {
      dlogits(s, y) =
          dpi.row(s).dot(softmax_row_jvp(policy_row, y).transpose());
    }
  }
  return dlogits;
}

}  // namespace cmg
