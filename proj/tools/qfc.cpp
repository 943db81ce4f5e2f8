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


// qfc: command-line front end for the experiments.
//
//   qfc <command> [--key value ...] [--config FILE] [--out DIR] [--seed N] [--threads N]

#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qfc/harness/config.hpp"
#include "qfc/harness/run.hpp"

int main(int argc, char** argv) {
  namespace h = qfc::harness;
  CLI::App app{"Quantum feedback control experiments"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every command");

  struct Sub {
    CLI::App* app = nullptr;
    std::map<std::string, std::string> values;
    std::map<std::string, CLI::Option*> options;
  };
  std::map<std::string, Sub> subs;
  const std::map<std::string, std::string> about{
      {"stabilize", "fidelity gap surface and Monte-Carlo check of the qubit schemes"},
      {"purify", "impurity with and without feedback under continuous measurement"},
      {"entangle", "two-stage feedback toward a Bell state"},
      {"bellpurify", "fidelity sequence of the nonlinear Bell purification map"},
      {"julia", "convergence raster of the Riemann-sphere map"},
      {"sme-run", "qubit dephasing ensemble against the Lindblad solution"},
      {"spin-collapse", "collective spin collapse under F_z measurement"}};
  for (const auto& name : h::commands()) {
    Sub& s = subs[name];
    s.app = app.add_subcommand(name, about.at(name));
    auto add = [&](const std::string& key, const std::string& help) {
      s.options[key] = s.app->add_option("--" + key, s.values[key], help);
    };
    for (const auto& spec : h::command_schema(name)) add(spec.key, spec.help + " (default " + spec.def + ")");
    add("config", "key=value file; flags override it");
    add("out", "output directory (default qfc-out)");
    add("seed", "base seed (default 1)");
    add("threads", "worker threads (default $QFC_THREADS, else 1)");
  }
  CLI11_PARSE(app, argc, argv);

  for (auto& [name, s] : subs) {
    if (!s.app->parsed()) continue;
    std::map<std::string, std::string> flags;
    std::optional<std::string> file;
    for (const auto& [key, opt] : s.options) {
      if (opt->count() == 0) continue;
      if (key == "config") {
        file = s.values[key];
      } else {
        flags[key] = s.values[key];
      }
    }
    try {
      const h::ExperimentConfig cfg = h::parse_config(name, flags, file ? std::optional<std::filesystem::path>(*file)
                                                                       : std::nullopt);
      const h::RunResult res = h::run(cfg);
      for (const auto& f : res.files) std::cout << f.string() << '\n';
    } catch (const std::exception& e) {
      std::cerr << "qfc " << name << ": " << e.what() << '\n';
      return 2;
    }
  }
  return 0;
}
