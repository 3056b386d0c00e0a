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
#include "cmg/utilities.hpp"

namespace cmg {
namespace {

double reward_entry(const UtilitySpec& utilities, int player,
                    const GameSpec& spec, int s, int joint) {
  const auto* lin =
      std::get_if<LinearReward>(&utilities.player_terms[player][0]);
  REQUIRE(lin != nullptr);
  return lin->reward[static_cast<std::size_t>(s) * spec.joint_action_count() +
                     joint];
}

TEST_SUITE("domains") {

TEST_CASE("ipd uses the normalized prisoner's dilemma payoffs") {
  const DomainCatalogEntry ipd = build_ipd();
  CHECK(ipd.spec.n_states == 4);
  CHECK(ipd.spec.gamma == 0.99);
  // Payoffs depend only on the joint action: (CC, CD, DC, DD).
  for (int s = 0; s < 4; ++s) {
    CHECK(reward_entry(ipd.utilities, 0, ipd.spec, s, 0) ==
          doctest::Approx(2.0 / 3.0));
    CHECK(reward_entry(ipd.utilities, 0, ipd.spec, s, 1) ==
          doctest::Approx(0.0));
    CHECK(reward_entry(ipd.utilities, 0, ipd.spec, s, 2) ==
          doctest::Approx(1.0));
    CHECK(reward_entry(ipd.utilities, 0, ipd.spec, s, 3) ==
          doctest::Approx(1.0 / 3.0));
    CHECK(reward_entry(ipd.utilities, 1, ipd.spec, s, 1) ==
          doctest::Approx(1.0));
    CHECK(reward_entry(ipd.utilities, 1, ipd.spec, s, 2) ==
          doctest::Approx(0.0));
  }
}

TEST_CASE("iterated NFG transitions are deterministic next-joint-action") {
  const DomainCatalogEntry ipd = build_ipd();
  for (int s = 0; s < 4; ++s) {
    for (int joint = 0; joint < 4; ++joint) {
      for (int s_next = 0; s_next < 4; ++s_next) {
        const double expected = s_next == joint ? 1.0 : 0.0;
        CHECK(ipd.spec.transition_prob(s_next, s, joint) == expected);
      }
    }
  }
  // Deterministic profiles induce point-mass kernel columns.
  Matrix tit_for_tat(4, 2);
  tit_for_tat << 1.0, 0.0, 0.0, 1.0, 1.0, 0.0, 0.0, 1.0;
  const PolicyProfile profile{{tit_for_tat, tit_for_tat}};
  const JointKernel kernel = joint_kernel(ipd.spec, profile);
  for (int s = 0; s < 4; ++s) {
    CHECK(kernel.col(s).maxCoeff() == doctest::Approx(1.0));
  }
}

TEST_CASE("bach-stravinsky payoffs") {
  const DomainCatalogEntry bs = build_bach_stravinsky(false);
  const int joint_bb = 0, joint_ss = 3;
  for (int s = 0; s < 4; ++s) {
    CHECK(reward_entry(bs.utilities, 0, bs.spec, s, joint_bb) == 3.0);
    CHECK(reward_entry(bs.utilities, 1, bs.spec, s, joint_bb) == 2.0);
    CHECK(reward_entry(bs.utilities, 0, bs.spec, s, joint_ss) == 2.0);
    CHECK(reward_entry(bs.utilities, 1, bs.spec, s, joint_ss) == 3.0);
    CHECK(reward_entry(bs.utilities, 0, bs.spec, s, 1) == 0.0);
    CHECK(reward_entry(bs.utilities, 0, bs.spec, s, 2) == 0.0);
  }
  const DomainCatalogEntry fair = build_bach_stravinsky(true);
  bool has_fairness = false;
  for (const UtilityTerm& term : fair.utilities.player_terms[0]) {
    if (const auto* f = std::get_if<FairnessPenalty>(&term)) {
      has_fairness = true;
      CHECK(f->s_plus == 0);
      CHECK(f->s_minus == 3);
      CHECK(f->weight == 1.0);
    }
  }
  CHECK(has_fairness);
}

TEST_CASE("el farol payoffs reward the uncrowded bar") {
  const DomainCatalogEntry ef = build_elfarol();
  // joint = (a1, a2, a3), bar = 0. All attend -> crowded -> 0 for everyone.
  CHECK(reward_entry(ef.utilities, 0, ef.spec, 0, 0) == 0.0);
  // Player 1 attends with one other -> 2; the stay-home player gets 1.
  const int joint_bbh = ef.spec.joint_index({0, 0, 1});
  CHECK(reward_entry(ef.utilities, 0, ef.spec, 0, joint_bbh) == 2.0);
  CHECK(reward_entry(ef.utilities, 2, ef.spec, 0, joint_bbh) == 1.0);
  // Alone at the bar -> still uncrowded -> 2.
  const int joint_bhh = ef.spec.joint_index({0, 1, 1});
  CHECK(reward_entry(ef.utilities, 0, ef.spec, 0, joint_bhh) == 2.0);
}

TEST_CASE("ipgg profits follow the 1.3 growth rule") {
  const DomainCatalogEntry ipgg = build_ipgg();
  const int all_in = ipgg.spec.joint_index({1, 1, 1});
  const int none = ipgg.spec.joint_index({0, 0, 0});
  const int only_first = ipgg.spec.joint_index({1, 0, 0});
  for (int player = 0; player < 3; ++player) {
    CHECK(reward_entry(ipgg.utilities, player, ipgg.spec, 0, all_in) ==
          doctest::Approx(0.3));
    CHECK(reward_entry(ipgg.utilities, player, ipgg.spec, 0, none) == 0.0);
  }
  CHECK(reward_entry(ipgg.utilities, 0, ipgg.spec, 0, only_first) ==
        doctest::Approx(1.3 / 3.0 - 1.0));
  CHECK(reward_entry(ipgg.utilities, 1, ipgg.spec, 0, only_first) ==
        doctest::Approx(1.3 / 3.0));
}

TEST_CASE("synthetic safety transition matches the published listing") {
  const DomainCatalogEntry entry = build_synthetic_safety();
  const GameSpec& spec = entry.spec;
  CHECK(spec.gamma == 0.95);
  // Both play 0 -> swap; otherwise stay.
  CHECK(spec.transition_prob(1, 0, 0) == 1.0);
  CHECK(spec.transition_prob(0, 1, 0) == 1.0);
  for (int joint = 1; joint < 4; ++joint) {
    CHECK(spec.transition_prob(0, 0, joint) == 1.0);
    CHECK(spec.transition_prob(1, 1, joint) == 1.0);
  }
}

TEST_CASE("occupancy inside both safety balls has zero loss") {
  const DomainCatalogEntry entry = build_synthetic_safety();
  const Matrix mu = Matrix::Constant(2, 2, 0.25);  // exactly on both targets
  const double value =
      utility_value(entry.utilities.player_terms[0], mu, Matrix::Zero(2, 2),
                    /*tau=*/0.0);
  CHECK(value == 0.0);
}

TEST_CASE("synthetic reference opponent reproduces the illustration") {
  const Matrix pi = synthetic_reference_opponent();
  CHECK(pi(0, 0) == 0.40);
  CHECK(pi(1, 0) == 0.80);
  CHECK(pi.row(0).sum() == doctest::Approx(1.0));
}

TEST_CASE("warehouse tensors: column sums, fast drop rewards, safety flag") {
  for (bool with_safety : {false, true}) {
    const DomainCatalogEntry entry = build_warehouse(with_safety);
    CHECK(validate_spec(entry.spec).ok());
    const auto* lin =
        std::get_if<LinearReward>(&entry.utilities.player_terms[1][0]);
    REQUIRE(lin != nullptr);
    // reward[1, 1, :, 1] = 2.0 in the published listing.
    CHECK(lin->reward[1 * 4 + 0 * 2 + 1] == 2.0);
    CHECK(lin->reward[1 * 4 + 1 * 2 + 1] == 2.0);
    CHECK(lin->reward[1 * 4 + 0 * 2 + 0] == 1.0);

    bool has_hinge = false;
    for (const UtilityTerm& term : entry.utilities.player_terms[0]) {
      if (const auto* hinge = std::get_if<HingePenalty>(&term)) {
        has_hinge = true;
        CHECK(hinge->state == 0);
        CHECK(hinge->action == 1);
        CHECK(hinge->threshold == 0.10);
        CHECK(hinge->weight == 100.0);
      }
    }
    CHECK(has_hinge == with_safety);
  }
}

TEST_CASE("warehouse unrepaired columns match the listing verbatim") {
  const GameSpec spec = build_warehouse(false).spec;
  const double p_drop_alone_slow = 0.7, p_drop_alone_fast = 0.8;
  // s = 1 and s = 2 columns are exactly the published products.
  CHECK(spec.transition_prob(0, 1, 0) ==
        doctest::Approx(1.0 - p_drop_alone_slow));
  CHECK(spec.transition_prob(2, 1, 2) == doctest::Approx(p_drop_alone_fast));
  CHECK(spec.transition_prob(0, 3, 0) == 1.0);
  // The both-slow pickup column keeps the published mid-probability split.
  CHECK(spec.transition_prob(1, 0, 0) == doctest::Approx(0.25));
  CHECK(spec.transition_prob(2, 0, 0) == doctest::Approx(0.25));
  CHECK(spec.transition_prob(3, 0, 0) == doctest::Approx(0.5));
  CHECK(spec.transition_prob(0, 0, 0) == doctest::Approx(0.0));
  // The mismatched-speed columns preserve the marginal success rates.
  CHECK(spec.transition_prob(1, 0, 1) == doctest::Approx(0.8));
  CHECK(spec.transition_prob(2, 0, 1) == doctest::Approx(0.2));
  CHECK(spec.transition_prob(3, 0, 1) == doctest::Approx(0.0));
}

TEST_CASE("imitation reference is positive and consistent") {
  const DomainCatalogEntry entry = build_imitation_ipd();
  const PolicyProfile human = human_ipd_profile();
  for (int i = 0; i < 2; ++i) {
    const auto* kl = std::get_if<KLPenalty>(&entry.utilities.player_terms[i][1]);
    REQUIRE(kl != nullptr);
    CHECK((kl->mu_ref.array() > 0.0).all());
    // KL of the human occupancy against its own floored reference vanishes.
    const Matrix mu = player_occupancy(entry.spec, human, i);
    double divergence = 0.0;
    for (int s = 0; s < 4; ++s) {
      for (int a = 0; a < 2; ++a) {
        if (mu(s, a) > 0.0) {
          divergence += mu(s, a) * std::log(mu(s, a) / kl->mu_ref(s, a));
        }
      }
    }
    CHECK(std::abs(divergence) < 1e-10);
  }
}

TEST_CASE("human profile utility is about 0.46 per player") {
  const DomainCatalogEntry ipd = build_ipd();
  const PolicyProfile human = human_ipd_profile();
  for (int i = 0; i < 2; ++i) {
    const Matrix mu = player_occupancy(ipd.spec, human, i);
    const Matrix r_vec =
        aggregate_reward_vector(ipd.spec, ipd.utilities, human, i);
    const double utility =
        utility_value(ipd.utilities.player_terms[i], mu, r_vec, 0.0);
    CHECK(utility == doctest::Approx(0.46).epsilon(0.025));
  }
}

TEST_CASE("catalog is sorted, complete, and validates") {
  const std::vector<DomainCatalogEntry>& catalog = domain_catalog();
  CHECK(catalog.size() == 9);
  for (std::size_t k = 1; k < catalog.size(); ++k) {
    CHECK(catalog[k - 1].name < catalog[k].name);
  }
  const std::vector<std::string> expected = {
      "bach-stravinsky", "bach-stravinsky-fair", "elfarol",
      "ipd",             "ipd-imitation",        "ipgg",
      "synthetic-safety", "warehouse",           "warehouse-safe"};
  for (std::size_t k = 0; k < expected.size(); ++k) {
    CHECK(catalog[k].name == expected[k]);
    CHECK(validate_spec(catalog[k].spec).ok());
  }
  CHECK(find_domain("ipd") != nullptr);
  CHECK(find_domain("nope") == nullptr);
}

TEST_CASE("table defaults match the published schedule") {
  CHECK(find_domain("ipd")->defaults.lr == 0.1);
  CHECK(find_domain("ipd")->defaults.anneal == AnnealType::kType1);
  CHECK(find_domain("ipd")->defaults.iterations == 8000);
  CHECK(find_domain("ipd-imitation")->defaults.lr == 0.01);
  CHECK(find_domain("warehouse")->defaults.lr == 0.01);
  CHECK(find_domain("warehouse")->defaults.anneal == AnnealType::kType2);
  CHECK(find_domain("synthetic-safety")->defaults.anneal ==
        AnnealType::kType2);
  CHECK(find_domain("bach-stravinsky")->defaults.iterations == 1000);
  CHECK(find_domain("bach-stravinsky-fair")->defaults.initial_tau == 0.0);
  CHECK(find_domain("bach-stravinsky-fair")->defaults.gaussian_init);
}

}  // TEST_SUITE

}  // namespace
}  // namespace cmg
