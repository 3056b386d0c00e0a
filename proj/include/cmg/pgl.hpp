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

#ifndef CMG_PGL_HPP_
#define CMG_PGL_HPP_

#include <vector>

#include "cmg/game.hpp"
#include "cmg/logits.hpp"
#include "cmg/occupancy.hpp"
#include "cmg/utilities.hpp"

namespace cmg {

// Orthogonal projector onto the null space of the flow matrix,
// Pi = I - A^T (A A^T)^{-1} A. (A A^T) is inverted through a Cholesky
// factorization with no regularization; a near-singular system (smallest
// eigenvalue below 1e-14) raises NumericError.
Matrix tangent_projection(const FlowMatrix& flow);

// Scalar loss L^tau = sum_i ||Pi_i grad_i||^2 together with its pieces and
// the exploitability upper bound tau log(|S| max_i |A_i|) + sqrt(2 n L^tau).
struct LossReport {
  double loss = 0.0;
  std::vector<double> player_norms;  // ||Pi_i grad_i||, one per player
  double tau = 0.0;
  double bound = 0.0;
};

// Evaluates the projected-gradient loss at a strictly positive profile.
// Annealed utility terms use the live temperature tau.
LossReport pgl_loss(const GameSpec& spec, const UtilitySpec& utilities,
                    const PolicyProfile& profile, double tau);

struct LossGradient {
  LossReport report;
  // d loss / d free logit, one [n_states, action_counts[i] - 1] matrix per
  // player.
  std::vector<Matrix> logit_grads;
};

// Exact gradient of pgl_loss with respect to every free logit. The chain
// rule runs through the occupancy map, the utility gradients, the projector's
// dependence on opponents' policies, and the softmax; tau is held constant.
LossGradient pgl_loss_gradient(const GameSpec& spec,
                               const UtilitySpec& utilities,
                               const LogitProfile& logits, double tau);

// Gradient of player i's own utility u_i(mu_i(pi), pi_{-i}) with respect to
// their own free logits, holding every other policy fixed. Used by the
// descent baselines.
Matrix own_utility_logit_gradient(const GameSpec& spec,
                                  const UtilitySpec& utilities,
                                  const LogitProfile& logits,
                                  const PolicyProfile& profile, int player,
                                  double tau);

}  // namespace cmg

#endif  // CMG_PGL_HPP_
