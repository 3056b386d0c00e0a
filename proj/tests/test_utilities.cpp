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

#include <doctest.h>

#include <cmath>

#include "cmg/domains.hpp"
#include "cmg/occupancy.hpp"
#include "cmg/rng.hpp"
#include "cmg/utilities.hpp"
#include "test_support.hpp"

namespace cmg {
namespace {

using testing::random_interior_profile;
using testing::random_reward;
using testing::random_spec;

// Random occupancy-shaped matrix on the simplex interior.
Matrix random_simplex_matrix(SplitMix64& rng, int rows, int cols) {
  Matrix m(rows, cols);
  double total = 0.0;
  for (int s = 0; s < rows; ++s) {
    for (int a = 0; a < cols; ++a) {
      m(s, a) = 0.05 + rng.next_double();
      total += m(s, a);
    }
  }
  return m / total;
}

TEST_SUITE("utilities") {

TEST_CASE("one-player expected reward vector is the reward itself") {
  SplitMix64 rng(41);
  const GameSpec spec = random_spec(rng, 1, 3, {2}, 0.9);
  const std::vector<double> reward = random_reward(rng, spec);
  const PolicyProfile profile = random_interior_profile(rng, spec);
  const Matrix r_vec = expected_reward_vector(spec, reward, profile, 0);
  for (int s = 0; s < 3; ++s) {
    for (int a = 0; a < 2; ++a) {
      CHECK(r_vec(s, a) ==
            doctest::Approx(reward[static_cast<std::size_t>(s) * 2 + a])
                .epsilon(1e-15));
    }
  }
}

TEST_CASE("IPD against always-defect: (0, 1/3) for (C, D)") {
  const DomainCatalogEntry ipd = build_ipd();
  PolicyProfile profile = uniform_profile(ipd.spec);
  Matrix defect(4, 2);
  defect << 0.0, 1.0, 0.0, 1.0, 0.0, 1.0, 0.0, 1.0;
  profile.policies[1] = defect;
  const auto* lin = std::get_if<LinearReward>(&ipd.utilities.player_terms[0][0]);
  REQUIRE(lin != nullptr);
  const Matrix r_vec = expected_reward_vector(ipd.spec, lin->reward, profile, 0);
  for (int s = 0; s < 4; ++s) {
    CHECK(r_vec(s, 0) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(r_vec(s, 1) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  }
}

TEST_CASE("expected reward vector matches brute-force enumeration") {
  SplitMix64 rng(43);
  const GameSpec spec = random_spec(rng, 3, 2, {2, 3, 2}, 0.9);
  const std::vector<double> reward = random_reward(rng, spec);
  const PolicyProfile profile = random_interior_profile(rng, spec);
  const int player = 1;
  const Matrix r_vec = expected_reward_vector(spec, reward, profile, player);

  for (int s = 0; s < spec.n_states; ++s) {
    for (int a1 = 0; a1 < 3; ++a1) {
      double expected = 0.0;
      for (int a0 = 0; a0 < 2; ++a0) {
        for (int a2 = 0; a2 < 2; ++a2) {
          const int joint = spec.joint_index({a0, a1, a2});
          expected += reward[static_cast<std::size_t>(s) *
                                 spec.joint_action_count() +
                             joint] *
                      profile.policies[0](s, a0) * profile.policies[2](s, a2);
        }
      }
      CHECK(r_vec(s, a1) == doctest::Approx(expected).epsilon(1e-12));
    }
  }
}

TEST_CASE("uniform occupancy entropy bonus is tau log k") {
  const Matrix mu = Matrix::Constant(2, 2, 0.25);
  const Matrix r_vec = Matrix::Zero(2, 2);
  const std::vector<UtilityTerm> terms = {EntropyBonus{0.7, false}};
  CHECK(utility_value(terms, mu, r_vec, 0.0) ==
        doctest::Approx(0.7 * std::log(4.0)).epsilon(1e-14));
}

TEST_CASE("KL penalty vanishes at the reference") {
  SplitMix64 rng(47);
  const Matrix mu = random_simplex_matrix(rng, 3, 2);
  const std::vector<UtilityTerm> terms = {KLPenalty{0.3, mu, false}};
  CHECK(utility_value(terms, mu, Matrix::Zero(3, 2), 0.0) ==
        doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("warehouse hinge value: 0.15 over a 0.10 threshold at weight 100") {
  Matrix mu = Matrix::Constant(4, 2, 0.1);
  mu(0, 1) = 0.15;
  const std::vector<UtilityTerm> terms = {HingePenalty{0, 1, 0.10, 100.0}};
  CHECK(utility_value(terms, mu, Matrix::Zero(4, 2), 0.0) ==
        doctest::Approx(-5.0).epsilon(1e-12));
}

TEST_CASE("entropy gradient at uniform is log 4 - 1") {
  const Matrix mu = Matrix::Constant(2, 2, 0.25);
  const std::vector<UtilityTerm> terms = {EntropyBonus{1.0, false}};
  const Matrix grad = utility_gradient(terms, mu, Matrix::Zero(2, 2), 0.0);
  CHECK((grad.array() - (std::log(4.0) - 1.0)).abs().maxCoeff() < 1e-14);
}

TEST_CASE("smooth gradients match central finite differences") {
  SplitMix64 rng(53);
  const Matrix mu = random_simplex_matrix(rng, 3, 2);
  const Matrix mu_ref = random_simplex_matrix(rng, 3, 2);
  Matrix r_vec(3, 2);
  for (int s = 0; s < 3; ++s) {
    for (int a = 0; a < 2; ++a) r_vec(s, a) = rng.next_gaussian();
  }
  const std::vector<UtilityTerm> terms = {
      EntropyBonus{0.3, false},
      KLPenalty{0.2, mu_ref, false},
      FairnessPenalty{0, 2, 1.5},
  };
  const Matrix grad = utility_gradient(terms, mu, r_vec, 0.0);
  const double step = 1e-6;
  for (int s = 0; s < 3; ++s) {
    for (int a = 0; a < 2; ++a) {
      Matrix plus = mu, minus = mu;
      plus(s, a) += step;
      minus(s, a) -= step;
      const double fd = (utility_value(terms, plus, r_vec, 0.0) -
                         utility_value(terms, minus, r_vec, 0.0)) /
                        (2.0 * step);
      const double scale = std::max(1.0, std::abs(fd));
      CHECK(std::abs(grad(s, a) - fd) / scale < 1e-6);
    }
  }
}

TEST_CASE("hinge exactly at its threshold has zero subgradient") {
  Matrix mu = Matrix::Constant(4, 2, 0.1);
  mu(0, 1) = 0.10;
  const std::vector<UtilityTerm> terms = {HingePenalty{0, 1, 0.10, 100.0}};
  const Matrix grad = utility_gradient(terms, mu, Matrix::Zero(4, 2), 0.0);
  CHECK(grad(0, 1) == 0.0);
}

TEST_CASE("every term is concave along random chords") {
  SplitMix64 rng(59);
  const Matrix mu_ref = random_simplex_matrix(rng, 2, 3);
  InfNormSafety safety;
  safety.target_action = Vector::Constant(3, 1.0 / 3.0);
  safety.target_state = Vector::Constant(2, 0.5);
  safety.radius_action = 0.05;
  safety.radius_state = 0.1;
  const std::vector<std::vector<UtilityTerm>> term_sets = {
      {EntropyBonus{0.5, false}},
      {KLPenalty{0.4, mu_ref, false}},
      {FairnessPenalty{0, 1, 2.0}},
      {HingePenalty{0, 1, 0.2, 3.0}},
      {UtilityTerm{safety}},
  };
  const Matrix r_vec = Matrix::Zero(2, 3);
  for (const auto& terms : term_sets) {
    for (int trial = 0; trial < 200; ++trial) {
      const Matrix a = random_simplex_matrix(rng, 2, 3);
      const Matrix b = random_simplex_matrix(rng, 2, 3);
      const double lambda = rng.next_double();
      const double mixed =
          utility_value(terms, lambda * a + (1.0 - lambda) * b, r_vec, 0.0);
      const double split = lambda * utility_value(terms, a, r_vec, 0.0) +
                           (1.0 - lambda) * utility_value(terms, b, r_vec, 0.0);
      CHECK(mixed >= split - 1e-10);
    }
  }
}

TEST_CASE("first-order Taylor residual shrinks quadratically") {
  SplitMix64 rng(61);
  const Matrix mu = random_simplex_matrix(rng, 2, 2);
  const Matrix mu_ref = random_simplex_matrix(rng, 2, 2);
  const std::vector<UtilityTerm> terms = {EntropyBonus{0.5, false},
                                          KLPenalty{0.3, mu_ref, false},
                                          FairnessPenalty{0, 1, 1.0}};
  Matrix direction(2, 2);
  for (int s = 0; s < 2; ++s) {
    for (int a = 0; a < 2; ++a) direction(s, a) = rng.next_gaussian();
  }
  direction /= direction.norm();
  const Matrix r_vec = Matrix::Zero(2, 2);
  const double base = utility_value(terms, mu, r_vec, 0.0);
  const Matrix grad = utility_gradient(terms, mu, r_vec, 0.0);
  double previous_ratio = -1.0;
  for (double h : {1e-2, 5e-3, 2.5e-3}) {
    const double moved = utility_value(terms, mu + h * direction, r_vec, 0.0);
    const double residual =
        std::abs(moved - base - h * grad.cwiseProduct(direction).sum());
    const double ratio = residual / (h * h);
    if (previous_ratio > 0.0) {
      CHECK(ratio < previous_ratio * 4.0);  // stays O(h^2)
    }
    previous_ratio = ratio;
  }
}

TEST_CASE("occupancy entropy differs from mean policy entropy") {
  // A profile that concentrates state mass: in the IPD both players defect
  // with high probability, so the chain loads state (D, D) while each
  // per-state action distribution stays moderately random.
  const DomainCatalogEntry ipd = build_ipd();
  Matrix skew(4, 2);
  skew << 0.2, 0.8, 0.2, 0.8, 0.2, 0.8, 0.2, 0.8;
  const PolicyProfile profile{{skew, skew}};
  const Matrix mu = player_occupancy(ipd.spec, profile, 0);

  double occupancy_entropy = 0.0;
  for (int s = 0; s < 4; ++s) {
    for (int a = 0; a < 2; ++a) {
      if (mu(s, a) > 0.0) occupancy_entropy -= mu(s, a) * std::log(mu(s, a));
    }
  }
  double mean_policy_entropy = 0.0;
  for (int s = 0; s < 4; ++s) {
    for (int a = 0; a < 2; ++a) {
      mean_policy_entropy -= 0.25 * skew(s, a) * std::log(skew(s, a));
    }
  }
  CHECK(std::abs(occupancy_entropy - mean_policy_entropy) > 0.1);
}

TEST_CASE("KL reference with a zero entry is rejected at construction") {
  const GameSpec spec = build_ipd().spec;
  UtilitySpec utilities;
  Matrix mu_ref = Matrix::Constant(4, 2, 0.125);
  mu_ref(0, 0) = 0.0;
  utilities.player_terms = {{KLPenalty{1.0, mu_ref, true}},
                            {EntropyBonus{1.0, true}}};
  CHECK_THROWS_AS(check_utilities(spec, utilities), SpecError);
}

TEST_CASE("annealed terms take the live temperature") {
  const Matrix mu = Matrix::Constant(2, 2, 0.25);
  const Matrix r_vec = Matrix::Zero(2, 2);
  const std::vector<UtilityTerm> terms = {EntropyBonus{123.0, true}};
  CHECK(utility_value(terms, mu, r_vec, 0.5) ==
        doctest::Approx(0.5 * std::log(4.0)));
  CHECK(utility_value(terms, mu, r_vec, 0.0) == doctest::Approx(0.0));
}

}  // TEST_SUITE

}  // namespace
}  // namespace cmg
