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

#include <string>

#include "cmg/config.hpp"
#include "cmg/domains.hpp"
#include "cmg/game.hpp"

namespace cmg {
namespace {

TEST_SUITE("game_core") {

TEST_CASE("synthetic two-state spec is valid") {
  const GameSpec spec = build_synthetic_safety().spec;
  const ValidationReport report = validate_spec(spec);
  CHECK_MESSAGE(report.ok(), report.to_string());
}

TEST_CASE("gamma at one is rejected") {
  GameSpec spec = build_synthetic_safety().spec;
  spec.gamma = 1.0;
  const ValidationReport report = validate_spec(spec);
  REQUIRE_FALSE(report.ok());
  bool found = false;
  for (const std::string& issue : report.issues) {
    if (issue.find("gamma strictly less than 1") != std::string::npos) {
      found = true;
    }
  }
  CHECK(found);
}

TEST_CASE("broken transition column is reported with its index") {
  GameSpec spec = build_synthetic_safety().spec;
  // Scale column (s=1, joint=2) down to 0.9.
  for (int s_next = 0; s_next < spec.n_states; ++s_next) {
    spec.transition[(static_cast<std::size_t>(s_next) * spec.n_states + 1) *
                        4 +
                    2] *= 0.9;
  }
  const ValidationReport report = validate_spec(spec);
  REQUIRE_FALSE(report.ok());
  bool found = false;
  for (const std::string& issue : report.issues) {
    if (issue.find("s=1") != std::string::npos &&
        issue.find("joint=2") != std::string::npos) {
      found = true;
    }
  }
  CHECK(found);
}

TEST_CASE("shape mismatch between transition and counts is rejected") {
  GameSpec spec = build_synthetic_safety().spec;
  spec.transition.pop_back();
  CHECK_FALSE(validate_spec(spec).ok());
}

TEST_CASE("negative probability is rejected") {
  GameSpec spec = build_synthetic_safety().spec;
  spec.transition[0] -= 1e-6;
  CHECK_FALSE(validate_spec(spec).ok());
}

TEST_CASE("ipd config document round-trips") {
  const DomainCatalogEntry ipd = build_ipd();
  const std::string document = save_spec(ipd.spec, ipd.utilities);
  const LoadedGame loaded = load_spec(document);
  CHECK(loaded.spec.n_states == 4);
  CHECK(loaded.spec.n_players == 2);
  CHECK(loaded.spec.action_counts == std::vector<int>{2, 2});
  CHECK(loaded.spec.gamma == 0.99);
  CHECK(loaded.spec.transition == ipd.spec.transition);
  CHECK(loaded.spec.mu0 == ipd.spec.mu0);
  // Second round trip is textually identical.
  CHECK(save_spec(loaded.spec, loaded.utilities) == document);
}

TEST_CASE("empty document is a parse error") {
  CHECK_THROWS_AS(load_spec(""), SpecError);
  CHECK_THROWS_AS(load_spec("not json"), SpecError);
}

TEST_CASE("unknown utility tag is rejected") {
  const DomainCatalogEntry ipd = build_ipd();
  std::string document = save_spec(ipd.spec, ipd.utilities);
  const std::size_t pos = document.find("\"entropy\"");
  REQUIRE(pos != std::string::npos);
  document.replace(pos, 9, "\"mystery\"");
  CHECK_THROWS_AS(load_spec(document), SpecError);
}

TEST_CASE("warehouse config reloads with the same reward tensor") {
  const DomainCatalogEntry warehouse = build_warehouse(false);
  const LoadedGame loaded =
      load_spec(save_spec(warehouse.spec, warehouse.utilities));
  const auto* lin =
      std::get_if<LinearReward>(&loaded.utilities.player_terms[1][0]);
  REQUIRE(lin != nullptr);
  const auto* original =
      std::get_if<LinearReward>(&warehouse.utilities.player_terms[1][0]);
  CHECK(lin->reward == original->reward);
  // Fast drop-offs pay 2.
  CHECK(lin->reward[static_cast<std::size_t>(1) * 4 + 1] == 2.0);
  CHECK(lin->reward[static_cast<std::size_t>(1) * 4 + 3] == 2.0);
}

TEST_CASE("round-trip is lossless for every catalog domain") {
  for (const DomainCatalogEntry& entry : domain_catalog()) {
    CAPTURE(entry.name);
    const std::string document = save_spec(entry.spec, entry.utilities);
    const LoadedGame loaded = load_spec(document);
    CHECK(loaded.spec.transition == entry.spec.transition);
    CHECK(loaded.spec.mu0 == entry.spec.mu0);
    CHECK(loaded.spec.gamma == entry.spec.gamma);
    CHECK(save_spec(loaded.spec, loaded.utilities) == document);
  }
}

TEST_CASE("validate_spec accepts every catalog domain") {
  for (const DomainCatalogEntry& entry : domain_catalog()) {
    CAPTURE(entry.name);
    CHECK(validate_spec(entry.spec).ok());
    CHECK_NOTHROW(check_utilities(entry.spec, entry.utilities));
  }
}

}  // TEST_SUITE

}  // namespace
}  // namespace cmg
