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

#ifndef CMG_CONFIG_HPP_
#define CMG_CONFIG_HPP_

#include <string>

#include "cmg/game.hpp"
#include "cmg/utilities.hpp"

namespace cmg {

struct LoadedGame {
  GameSpec spec;
  UtilitySpec utilities;
};

// Parses a JSON game config. Top-level keys: `players`, `states`, `actions`
// (list), `gamma`, `mu0` (list), `transition` (flat, row-major
// [s_next, s, a_1..a_n]), optional `reward` (flat, [player, s, a_1..a_n]),
// and `utilities` (per player, a list of {"kind", "params"} tags:
// "linear_reward", "entropy", "kl_ref", "fairness_pair", "hinge",
// "infnorm_safety"). Throws SpecError with the offending field on parse or
// validation failure.
LoadedGame load_spec(const std::string& document);

// Serializes spec + utilities back into the same schema; numbers round-trip
// at full double precision, so load_spec(save_spec(g)) reproduces g exactly.
std::string save_spec(const GameSpec& spec, const UtilitySpec& utilities);

}  // namespace cmg

#endif  // CMG_CONFIG_HPP_
