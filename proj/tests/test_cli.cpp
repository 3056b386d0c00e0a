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

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>

#include "cmg/config.hpp"
#include "cmg/domains.hpp"

namespace cmg {
namespace {

using nlohmann::json;

std::string cmg_binary() {
  const char* path = std::getenv("CMG_BIN");
  return path == nullptr ? "" : path;
}

int run(const std::string& args, std::string* output = nullptr) {
  const std::string command = cmg_binary() + " " + args + " 2>&1";
  FILE* pipe = popen(command.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string captured;
  char buffer[4096];
  while (fgets(buffer, sizeof(buffer), pipe) != nullptr) captured += buffer;
  const int status = pclose(pipe);
  if (output != nullptr) *output = captured;
  return WEXITSTATUS(status);
}

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  return json::parse(in);
}

std::filesystem::path fresh_dir(const std::string& tag) {
  const std::filesystem::path dir =
      std::filesystem::temp_directory_path() / ("cmg_cli_" + tag);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

TEST_SUITE("cli") {

TEST_CASE("solve writes trace, policy, and summary") {
  if (cmg_binary().empty()) return;  // only meaningful under ctest
  const auto dir = fresh_dir("solve");
  const int code = run("solve --domain synthetic-safety --iters 60 --stride "
                       "10 --out " + dir.string());
  CHECK(code == 0);
  CHECK(std::filesystem::exists(dir / "trace.csv"));
  CHECK(std::filesystem::exists(dir / "policy.json"));
  CHECK(std::filesystem::exists(dir / "summary.json"));

  // ceil(60 / 10) stride rows + final row + header.
  std::ifstream trace(dir / "trace.csv");
  std::string line;
  int rows = 0;
  std::getline(trace, line);
  CHECK(line == "iter,tau,loss,bound,epsilon,wallclock_ms");
  while (std::getline(trace, line)) ++rows;
  CHECK(rows == 7);

  const json summary = read_json(dir / "summary.json");
  CHECK(summary.contains("final_epsilon"));
  CHECK(summary.contains("per_state_epsilon"));
  CHECK(summary["config"]["domain"] == "synthetic-safety");
}

TEST_CASE("solve with zero iterations returns the initialization") {
  if (cmg_binary().empty()) return;
  const auto dir = fresh_dir("zero");
  const int code =
      run("solve --domain ipd --iters 0 --out " + dir.string());
  CHECK(code == 0);
  const json policy = read_json(dir / "policy.json");
  for (const auto& player : policy["policy"]) {
    for (const auto& row : player) {
      for (const auto& p : row) {
        CHECK(p.get<double>() == doctest::Approx(0.5));
      }
    }
  }
}

TEST_CASE("exploitability command agrees with the solve summary") {
  if (cmg_binary().empty()) return;
  const auto dir = fresh_dir("eps");
  REQUIRE(run("solve --domain synthetic-safety --iters 200 --out " +
              dir.string()) == 0);
  const json summary = read_json(dir / "summary.json");
  const int code = run("exploitability --domain synthetic-safety --policy " +
                       (dir / "policy.json").string() + " --out " +
                       dir.string());
  CHECK(code == 0);
  const json epsilon = read_json(dir / "epsilon.json");
  CHECK(std::abs(epsilon["max"].get<double>() -
                 summary["final_epsilon"].get<double>()) <= 1e-9);
}

TEST_CASE("exploitability rejects a mismatched policy shape") {
  if (cmg_binary().empty()) return;
  const auto dir = fresh_dir("shape");
  std::ofstream bad(dir / "policy.json");
  bad << R"({"policy": [[[0.5, 0.5]], [[0.5, 0.5]]]})";
  bad.close();
  const int code = run("exploitability --domain ipd --policy " +
                       (dir / "policy.json").string() + " --out " +
                       dir.string());
  CHECK(code == 1);
}

TEST_CASE("solve on a config file works") {
  if (cmg_binary().empty()) return;
  const auto dir = fresh_dir("config");
  const DomainCatalogEntry entry = build_synthetic_safety();
  std::ofstream config(dir / "game.json");
  config << save_spec(entry.spec, entry.utilities);
  config.close();
  const int code = run("solve --config " + (dir / "game.json").string() +
                       " --iters 30 --lr 0.1 --anneal 2 --out " +
                       dir.string());
  CHECK(code == 0);
  CHECK(std::filesystem::exists(dir / "summary.json"));
}

TEST_CASE("invalid invocations exit with code 1") {
  if (cmg_binary().empty()) return;
  CHECK(run("solve --domain no-such-domain") == 1);
  CHECK(run("solve") == 1);  // neither domain nor config
  const auto dir = fresh_dir("badcfg");
  std::ofstream config(dir / "bad.json");
  config << "{";
  config.close();
  CHECK(run("solve --config " + (dir / "bad.json").string()) == 1);
}

TEST_CASE("list-domains is sorted and carries the defaults") {
  if (cmg_binary().empty()) return;
  std::string output;
  CHECK(run("list-domains", &output) == 0);
  CHECK(output.find("ipd: players=2 states=4") != std::string::npos);
  CHECK(output.find("lr=0.1 anneal=type 1 iters=8000") != std::string::npos);
  CHECK(output.find("warehouse:") != std::string::npos);
  CHECK(output.find("lr=0.01 anneal=type 2") != std::string::npos);
  // Stable (sorted) order.
  CHECK(output.find("bach-stravinsky") < output.find("elfarol"));
  CHECK(output.find("elfarol") < output.find("ipd:"));
  CHECK(output.find("synthetic-safety") < output.find("warehouse"));
  std::string second;
  CHECK(run("list-domains", &second) == 0);
  CHECK(output == second);
}

TEST_CASE("multi-seed runs write per-seed artifacts") {
  if (cmg_binary().empty()) return;
  const auto dir = fresh_dir("seeds");
  const int code = run(
      "solve --domain bach-stravinsky-fair --iters 40 --seeds 3 --jobs 2 "
      "--seed 5 --out " + dir.string());
  CHECK(code == 0);
  for (int seed = 5; seed < 8; ++seed) {
    CHECK(std::filesystem::exists(dir / ("seed_" + std::to_string(seed)) /
                                  "summary.json"));
  }
}

}  // TEST_SUITE

}  // namespace
}  // namespace cmg
