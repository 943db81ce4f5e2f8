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

#ifndef QFC_HARNESS_CONFIG_HPP
#define QFC_HARNESS_CONFIG_HPP

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "qfc/core/linalg.hpp"
#include "qfc/io/csv.hpp"

namespace qfc::harness {

/// Every problem found while parsing, one message per field.
class ConfigError : public Error {
 public:
  explicit ConfigError(std::vector<std::string> problems) : Error(join(problems)), problems_(std::move(problems)) {}
  const std::vector<std::string>& problems() const { return problems_; }

 private:
  static std::string join(const std::vector<std::string>& p) {
    std::string s = "invalid configuration:";
    for (const auto& m : p) s += "\n  " + m;
    return s;
  }
  std::vector<std::string> problems_;
};

enum class Kind { Real, Integer, Text, Grid };

struct ParamSpec {
  std::string key;
  Kind kind = Kind::Real;
  std::string def;
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  bool lo_open = false;
  bool hi_open = false;
  std::vector<std::string> choices;
  std::string help;
};

namespace detail {

inline ParamSpec real(std::string key, double def, std::string help, double lo = -INFINITY, double hi = INFINITY,
                      bool lo_open = false, bool hi_open = false) {
  return {std::move(key), Kind::Real, io::format_double(def), lo, hi, lo_open, hi_open, {}, std::move(help)};
}
inline ParamSpec positive(std::string key, double def, std::string help) {
  return real(std::move(key), def, std::move(help), 0.0, INFINITY, true, false);
}
inline ParamSpec integer(std::string key, long long def, std::string help, long long lo = 1,
                         long long hi = std::numeric_limits<int>::max()) {
  return {std::move(key), Kind::Integer, std::to_string(def), double(lo), double(hi), false, false, {}, std::move(help)};
}
inline ParamSpec choice(std::string key, std::string def, std::vector<std::string> choices, std::string help) {
  ParamSpec s;
  s.key = std::move(key);
  s.kind = Kind::Text;
  s.def = std::move(def);
  s.choices = std::move(choices);
  s.help = std::move(help);
  return s;
}

} // namespace detail

inline const std::vector<std::string>& commands() {
  static const std::vector<std::string> c{"stabilize", "purify", "entangle", "bellpurify",
                                          "julia", "sme-run", "spin-collapse"};
  return c;
}

/// Parameters of one command, without the common keys (seed, out, threads).
inline std::vector<ParamSpec> command_schema(const std::string& command) {
  using namespace detail;
  const double pi = std::numbers::pi;
  if (command == "stabilize") {
    return {real("p", 0.115, "dephasing probability", 0.0, 0.5),
            real("theta", 0.715, "input-pair angle", 0.0, pi / 2),
            integer("samples", 100000, "Monte-Carlo samples per scheme"),
            integer("grid", 101, "surface points per axis", 2, 5001)};
  }
  if (command == "purify") {
    return {positive("k", 1.0, "measurement strength"),
            positive("dt", 1e-4, "ensemble time step"),
            positive("horizon", 2.0, "final time"),
            integer("trajectories", 1000, "open-loop trajectories"),
            integer("checkpoints", 20, "output rows after t = 0"),
            real("target", 1e-3, "target impurity for the speed-up ratio", 0.0, 1e-2, true, false),
            positive("feedback-dt", 1e-5, "time step of the feedback path")};
  }
  if (command == "entangle") {
    return {positive("k", 1.0, "measurement strength"),
            positive("dt", 1e-3, "time step"),
            positive("horizon", 10.0, "budget in units of k t"),
            choice("init", "mixed", {"mixed", "psi+", "phi+", "product"}, "initial state"),
            integer("runs", 1, "independent runs (stream i of the seed)"),
            integer("record-every", 10, "output stride in steps"),
            real("leakage", 1e-3, "stage-1 threshold", 0.0, 0.5, true, true),
            real("purity", 0.995, "stage-2 threshold", 0.5, 1.0, true, true)};
  }
  if (command == "bellpurify") {
    return {integer("steps", 30, "iterations", 0, 100000), real("x", pi / 4, "rotation angle x"),
            real("phi", pi / 2, "rotation phase phi")};
  }
  if (command == "julia") {
    ParamSpec grid;
    grid.key = "grid";
    grid.kind = Kind::Grid;
    grid.def = "512x512";
    grid.help = "WIDTHxHEIGHT";
    return {real("p-re", 1.0, "Re p"), real("p-im", 0.0, "Im p"), grid,
            integer("max-iters", 40, "iteration cap"),
            real("re-min", -2.0, "viewport"), real("re-max", 2.0, "viewport"),
            real("im-min", -2.0, "viewport"), real("im-max", 2.0, "viewport"),
            positive("cycle-tol", 1e-9, "chordal cycle tolerance"),
            integer("max-period", 8, "longest cycle searched", 1, 64)};
  }
  if (command == "sme-run") {
    return {positive("k", 1.0, "measurement strength"), real("omega-x", 0.0, "Rabi frequency about x"),
            positive("dt", 1e-3, "time step"), integer("steps", 1000, "steps"),
            integer("trajectories", 200, "trajectories"), integer("record-every", 10, "output stride in steps"),
            choice("scheme", "euler", {"euler", "kraus"}, "step scheme")};
  }
  if (command == "spin-collapse") {
    return {integer("two-j", 10, "twice the spin", 1, 200), positive("m", 1.0, "measurement strength M"),
            real("eta", 1.0, "detection efficiency", 0.0, 1.0, true, false), real("s", 0.0, "F_z precession"),
            real("u", 0.0, "constant F_y control"), positive("dt", 2e-4, "time step"),
            integer("steps", 5000, "steps"), integer("trajectories", 50, "trajectories"),
            integer("record-every", 50, "output stride in steps"),
            choice("scheme", "euler", {"euler", "kraus"}, "step scheme")};
  }
  throw ConfigError({"unknown command '" + command + "'"});
}

struct ExperimentConfig {
  std::string command;
  std::map<std::string, std::string> values;  // every schema key, resolved
  std::uint64_t seed = 1;
  std::string out_path = "qfc-out";
  std::optional<std::size_t> threads;

  double real(const std::string& key) const { return std::strtod(values.at(key).c_str(), nullptr); }
  long long integer(const std::string& key) const { return std::strtoll(values.at(key).c_str(), nullptr, 10); }
  const std::string& text(const std::string& key) const { return values.at(key); }
  std::pair<int, int> grid(const std::string& key) const {
    const std::string& g = values.at(key);
    const auto x = g.find('x');
    return {std::atoi(g.substr(0, x).c_str()), std::atoi(g.substr(x + 1).c_str())};
  }

  /// command, seed and every parameter. out and threads are left out: they do
  /// not change any result.
  io::Preamble preamble() const {
    io::Preamble p(values.begin(), values.end());
    p["command"] = command;
    p["seed"] = std::to_string(seed);
    return p;
  }
};

namespace detail {

inline std::string normalize_key(std::string k) {
  while (!k.empty() && k.front() == '-') k.erase(k.begin());
  for (char& c : k) {
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (c == '_') c = '-';
  }
  return k;
}

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline std::optional<double> parse_real(const std::string& s) {
  if (s.empty()) return std::nullopt;
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || errno == ERANGE || !std::isfinite(v)) return std::nullopt;
  return v;
}

inline std::optional<long long> parse_integer(const std::string& s) {
  if (s.empty()) return std::nullopt;
  errno = 0;
  char* end = nullptr;
  const long long v = std::strtoll(s.c_str(), &end, 10);
  if (end != s.c_str() + s.size() || errno == ERANGE) return std::nullopt;
  return v;
}

inline std::string describe_range(const ParamSpec& s) {
  std::ostringstream os;
  os << (s.lo_open ? "(" : "[") << s.lo << ", " << s.hi << (s.hi_open ? ")" : "]");
  return os.str();
}

/// Canonical text of a valid value, or an error message.
inline std::pair<std::string, std::string> check_value(const ParamSpec& s, const std::string& raw) {
  const std::string v = trim(raw);
  switch (s.kind) {
    case Kind::Real: {
      const auto x = parse_real(v);
      if (!x) return {"", s.key + ": '" + v + "' is not a finite number"};
      const bool low = s.lo_open ? !(*x > s.lo) : !(*x >= s.lo);
      const bool high = s.hi_open ? !(*x < s.hi) : !(*x <= s.hi);
      if (low || high) return {"", s.key + ": " + v + " outside " + describe_range(s)};
      return {io::format_double(*x), ""};
    }
    case Kind::Integer: {
      const auto x = parse_integer(v);
      if (!x) return {"", s.key + ": '" + v + "' is not an integer"};
      if (*x < s.lo || *x > s.hi) return {"", s.key + ": " + v + " outside " + describe_range(s)};
      return {std::to_string(*x), ""};
    }
    case Kind::Text: {
      if (!s.choices.empty() && std::find(s.choices.begin(), s.choices.end(), v) == s.choices.end()) {
        std::string opts;
        for (const auto& c : s.choices) opts += (opts.empty() ? "" : "|") + c;
        return {"", s.key + ": '" + v + "' is not one of " + opts};
      }
      return {v, ""};
    }
    case Kind::Grid: {
      const auto x = v.find('x');
      const auto w = x == std::string::npos ? std::nullopt : parse_integer(v.substr(0, x));
      const auto h = x == std::string::npos ? std::nullopt : parse_integer(v.substr(x + 1));
      if (!w || !h || *w < 1 || *h < 1 || *w > 16384 || *h > 16384) {
        return {"", s.key + ": '" + v + "' is not WIDTHxHEIGHT with sides in [1, 16384]"};
      }
      return {std::to_string(*w) + "x" + std::to_string(*h), ""};
    }
  }
  return {"", s.key + ": unsupported kind"};
}

/// Reads flat key=value lines; # starts a comment.
inline std::map<std::string, std::string> read_config_file(const std::filesystem::path& path,
                                                           std::vector<std::string>& problems) {
  std::map<std::string, std::string> out;
  std::ifstream f(path);
  if (!f) {
    problems.push_back("config: cannot read '" + path.string() + "'");
    return out;
  }
  std::string line;
  int n = 0;
  while (std::getline(f, line)) {
    ++n;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      problems.push_back("config line " + std::to_string(n) + ": expected key=value");
      continue;
    }
    out[normalize_key(trim(line.substr(0, eq)))] = trim(line.substr(eq + 1));
  }
  return out;
}

/// Cross-field limits the single-field ranges cannot express.
inline void check_combined(const ExperimentConfig& c, std::vector<std::string>& problems) {
  if (c.command == "purify") {
    if (c.real("k") * c.real("dt") > 1e-3) problems.push_back("dt: k*dt must not exceed 1e-3");
    if (c.real("k") * c.real("feedback-dt") > 1e-3) problems.push_back("feedback-dt: k*feedback-dt must not exceed 1e-3");
  } else if (c.command == "entangle" || c.command == "sme-run") {
    if (2.0 * c.real("k") * c.real("dt") > 1e-2) problems.push_back("dt: 2*k*dt must not exceed 1e-2");
  } else if (c.command == "spin-collapse") {
    const double j = 0.5 * static_cast<double>(c.integer("two-j"));
    if (c.real("m") * j * j * c.real("dt") > 1e-2) problems.push_back("dt: M*j^2*dt must not exceed 1e-2");
  } else if (c.command == "julia") {
    if (!(c.real("re-max") > c.real("re-min"))) problems.push_back("re-max: must exceed re-min");
    if (!(c.real("im-max") > c.real("im-min"))) problems.push_back("im-max: must exceed im-min");
  }
}

} // namespace detail

/// Resolves defaults, then the file, then the flags (later wins). Keys may use
/// dashes or underscores.
inline ExperimentConfig parse_config(const std::string& command, const std::map<std::string, std::string>& flags,
                                     const std::optional<std::filesystem::path>& file = std::nullopt) {
  std::vector<std::string> problems;
  if (std::find(commands().begin(), commands().end(), command) == commands().end()) {
    throw ConfigError({"unknown command '" + command + "'"});
  }
  const auto schema = command_schema(command);
  std::map<std::string, std::string> given;
  if (file) given = detail::read_config_file(*file, problems);
  for (const auto& [k, v] : flags) given[detail::normalize_key(k)] = v;

  ExperimentConfig cfg;
  cfg.command = command;
  for (const auto& s : schema) cfg.values[s.key] = s.def;
  for (const auto& [k, v] : given) {
    if (k == "seed") {
      const auto x = detail::parse_integer(detail::trim(v));
      if (!x || *x < 0) {
        problems.push_back("seed: '" + v + "' is not a non-negative integer");
      } else {
        cfg.seed = static_cast<std::uint64_t>(*x);
      }
      continue;
    }
    if (k == "out") {
      if (detail::trim(v).empty()) problems.push_back("out: empty path");
      cfg.out_path = detail::trim(v);
      continue;
    }
    if (k == "threads") {
      const auto x = detail::parse_integer(detail::trim(v));
      if (!x || *x < 1) {
        problems.push_back("threads: '" + v + "' is not a positive integer");
      } else {
        cfg.threads = static_cast<std::size_t>(*x);
      }
      continue;
    }
    if (k == "command") {
      if (detail::trim(v) != command) problems.push_back("command: file says '" + v + "' but '" + command + "' was run");
      continue;
    }
    const auto it = std::find_if(schema.begin(), schema.end(), [&](const ParamSpec& s) { return s.key == k; });
    if (it == schema.end()) {
      problems.push_back(k + ": unknown key for '" + command + "'");
      continue;
    }
    auto [canon, err] = detail::check_value(*it, v);
    if (!err.empty()) {
      problems.push_back(err);
    } else {
      cfg.values[k] = canon;
    }
  }
  if (problems.empty()) detail::check_combined(cfg, problems);
  if (!problems.empty()) throw ConfigError(std::move(problems));
  return cfg;
}

} // namespace qfc::harness

#endif // QFC_HARNESS_CONFIG_HPP
