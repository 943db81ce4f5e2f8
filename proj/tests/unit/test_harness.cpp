// Copyright 2026 The QFC Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "qfc/harness/config.hpp"
#include "qfc/harness/run.hpp"
#include "qfc/io/csv.hpp"

namespace {

using namespace qfc;
using namespace qfc::harness;
namespace fs = std::filesystem;

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("qfc_harness_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

std::vector<std::string> problems_of(const std::string& cmd, const std::map<std::string, std::string>& flags) {
  try {
    parse_config(cmd, flags);
  } catch (const ConfigError& e) {
    return e.problems();
  }
  return {};
}

TEST(Config, DefaultsForEveryCommand) {
  for (const auto& cmd : commands()) {
    const ExperimentConfig c = parse_config(cmd, {});
    EXPECT_EQ(c.command, cmd);
    EXPECT_EQ(c.seed, 1u);
    EXPECT_FALSE(c.threads.has_value());
    for (const auto& s : command_schema(cmd)) EXPECT_EQ(c.values.at(s.key), s.def) << cmd << ' ' << s.key;
  }
}

TEST(Config, FlagsOverrideFileOverrideDefaults) {
  const fs::path dir = scratch("layer");
  const fs::path file = dir / "c.cfg";
  {
    std::ofstream f(file);
    f << "# comment\nk = 2.5\ndt=1e-4  # trailing\nseed=9\nhorizon=3\n";
  }
  const ExperimentConfig c = parse_config("entangle", {{"--horizon", "4"}, {"record_every", "7"}}, file);
  EXPECT_EQ(c.real("k"), 2.5);
  EXPECT_EQ(c.real("dt"), 1e-4);
  EXPECT_EQ(c.real("horizon"), 4.0);
  EXPECT_EQ(c.integer("record-every"), 7);
  EXPECT_EQ(c.seed, 9u);
  EXPECT_EQ(c.text("init"), "mixed");
}

TEST(Config, ValuesAreCanonical) {
  const ExperimentConfig a = parse_config("purify", {{"k", "1.0"}, {"dt", "0.0001"}});
  const ExperimentConfig b = parse_config("purify", {{"k", " 1 "}, {"dt", "1e-4"}});
  EXPECT_EQ(a.values, b.values);
  EXPECT_EQ(a.preamble(), b.preamble());
  EXPECT_EQ(parse_config("julia", {{"grid", "64x32"}}).grid("grid"), std::make_pair(64, 32));
}

TEST(Config, ReportsEveryProblem) {
  const auto p = problems_of("entangle", {{"k", "-1"}, {"init", "bogus"}, {"colour", "red"}, {"seed", "x"}});
  EXPECT_EQ(p.size(), 4u);
  EXPECT_FALSE(problems_of("julia", {{"grid", "10by10"}}).empty());
  EXPECT_FALSE(problems_of("stabilize", {{"p", "0.6"}}).empty());
  EXPECT_FALSE(problems_of("purify", {{"dt", "0.01"}}).empty());  // k dt too large
  EXPECT_FALSE(problems_of("julia", {{"re-min", "1"}, {"re-max", "0"}}).empty());
  EXPECT_FALSE(problems_of("sme-run", {{"threads", "0"}}).empty());
  EXPECT_FALSE(problems_of("purify", {{"target", "nan"}}).empty());
  EXPECT_THROW(parse_config("nope", {}), ConfigError);
  EXPECT_THROW(parse_config("purify", {}, fs::path("/nonexistent/qfc.cfg")), ConfigError);
}

TEST(Config, PreambleLeavesOutDeliveryKeys) {
  const ExperimentConfig a = parse_config("bellpurify", {{"out", "/tmp/a"}, {"threads", "1"}});
  const ExperimentConfig b = parse_config("bellpurify", {{"out", "/tmp/b"}, {"threads", "4"}});
  EXPECT_EQ(a.preamble(), b.preamble());
  EXPECT_EQ(a.preamble().at("command"), "bellpurify");
  EXPECT_EQ(a.preamble().count("out"), 0u);
}

TEST(Io, FormatsAndEscapes) {
  EXPECT_EQ(io::format_double(0.1), "0.10000000000000001");
  EXPECT_EQ(std::stod(io::format_double(1.0 / 3.0)), 1.0 / 3.0);
  EXPECT_EQ(io::format_double(-INFINITY), "-inf");
  EXPECT_EQ(io::csv_escape("a,b"), "\"a,b\"");
  EXPECT_EQ(io::csv_escape("say \"x\""), "\"say \"\"x\"\"\"");
  io::CsvTable t({"a", "b"});
  t.add({1.5, 2LL});
  t.add({std::string("x"), 0.25});
  EXPECT_THROW(t.add({1.0}), std::invalid_argument);
  EXPECT_EQ(t.str({{"seed", "3"}}), "# seed=3\na,b\n1.5,2\nx,0.25\n");
}

TEST(Io, Pgm) {
  const std::string s = io::pgm_string({-1, 0, 5, 10}, 2, 2, 10, {{"p", "1"}});
  EXPECT_EQ(s, "P2\n# p=1\n2 2\n255\n0 255\n128 1\n");
  EXPECT_THROW(io::pgm_string({0, 1}, 2, 2, 1), std::invalid_argument);
}

std::map<std::string, std::string> small(const std::string& cmd) {
  if (cmd == "stabilize") return {{"grid", "5"}, {"samples", "2000"}};
  if (cmd == "purify") return {{"horizon", "0.05"}, {"trajectories", "40"}, {"checkpoints", "5"}};
  if (cmd == "entangle") return {{"runs", "3"}, {"horizon", "4"}, {"record-every", "50"}};
  if (cmd == "julia") return {{"grid", "24x16"}, {"max-iters", "20"}};
  if (cmd == "sme-run") return {{"steps", "200"}, {"trajectories", "30"}};
  if (cmd == "spin-collapse") return {{"two-j", "4"}, {"steps", "500"}, {"trajectories", "10"}};
  return {};
}

TEST(Run, ByteIdenticalAcrossThreadCounts) {
  for (const auto& cmd : commands()) {
    std::vector<std::vector<std::string>> outputs;
    for (const char* th : {"1", "3"}) {
      auto flags = small(cmd);
      const fs::path dir = scratch(cmd + "_" + th);
      flags["out"] = dir.string();
      flags["threads"] = th;
      flags["seed"] = "17";
      const RunResult r = run(parse_config(cmd, flags));
      ASSERT_FALSE(r.files.empty()) << cmd;
      std::vector<std::string> texts;
      for (const auto& f : r.files) {
        ASSERT_TRUE(fs::exists(f)) << f;
        texts.push_back(slurp(f));
      }
      outputs.push_back(texts);
    }
    EXPECT_EQ(outputs[0], outputs[1]) << cmd;
    EXPECT_EQ(outputs[0][0].rfind("# ", 0), cmd == "julia" ? std::string::npos : 0u) << cmd;
  }
}

TEST(Run, SeedChangesStochasticOutput) {
  auto flags = small("sme-run");
  flags["out"] = scratch("seed_a").string();
  const std::string a = slurp(run(parse_config("sme-run", flags)).files.at(0));
  flags["seed"] = "2";
  flags["out"] = scratch("seed_b").string();
  const std::string b = slurp(run(parse_config("sme-run", flags)).files.at(0));
  EXPECT_NE(a, b);
}

} // namespace
