// Copyright 2026 The rshe Authors
// SPDX-License-Identifier: Apache-2.0
//
// Run configuration: flat dotted keys, read from `key = value` text or from
// JSON (nested objects flatten to dotted keys, arrays to lists).
#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "rshe/error.hpp"
#include "rshe/experiments.hpp"

namespace rshe {

struct RunConfig {
  int n = 64;
  int cutoff = -1;  // -1: n/2 - 1
  double lambda = 0.75;
  std::uint64_t seed = 2026;
  double noise_scale = 1.0;
  double h = 1e-3;
  double T = 0.5;
  int record_every = 1;
  std::size_t paths = 200;
  std::string initial = "bump";
  std::vector<double> t_grid = {1.0 / 32, 1.0 / 16, 1.0 / 8, 1.0 / 4, 1.0 / 2, 1.0};
  std::vector<double> eps_grid = {0.0, 1e-3, 1e-2};
  std::vector<double> h_grid = {4e-3, 2e-3, 1e-3};
  int levels = 4;
  int probes = 2;
  double alpha = 20.0;
  double delta = 0.05;
  int bridge_pairs = 1000;
  std::string bridge_samples;  // optional sample file to ingest
  std::string output_dir;

  [[nodiscard]] int effective_cutoff() const { return cutoff < 0 ? n / 2 - 1 : cutoff; }

  [[nodiscard]] SchemeConfig scheme() const {
    SchemeConfig s;
    s.grid = make_grid(n);
    s.noise.lambda = lambda;
    s.noise.cutoff = effective_cutoff();
    s.noise.master_seed = seed;
    s.noise.scale = noise_scale;
    s.h = h;
    s.T = T;
    s.record_every = record_every;
    return s;
  }

  [[nodiscard]] ExperimentConfig experiment(unsigned threads) const {
    return ExperimentConfig{scheme(), paths, threads, initial};
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

template <class T>
T parse_number(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  T v{};
  const auto [end, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  require(ec == std::errc() && end == t.data() + t.size() && !t.empty(),
          key + ": cannot parse '" + text + "' as a number");
  return v;
}

inline std::vector<double> parse_list(const std::string& key, const std::string& text) {
  std::string t = trim(text);
  if (!t.empty() && t.front() == '[' && t.back() == ']') t = t.substr(1, t.size() - 2);
  std::vector<double> out;
  std::stringstream ss(t);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_number<double>(key, item));
  require(!out.empty(), key + ": list is empty");
  return out;
}

inline void flatten(const nlohmann::json& j, const std::string& prefix, std::map<std::string, std::string>& out) {
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it) {
      flatten(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), out);
    }
    return;
  }
  if (j.is_array()) {
    std::string s;
    for (const auto& v : j) {
      require(v.is_number(), prefix + ": list entries must be numbers");
      if (!s.empty()) s += ',';
      s += format_double(v.get<double>());
    }
    out[prefix] = s;
    return;
  }
  if (j.is_string()) {
    out[prefix] = j.get<std::string>();
  } else if (j.is_number_unsigned()) {
    out[prefix] = std::to_string(j.get<std::uint64_t>());
  } else if (j.is_number_integer()) {
    out[prefix] = std::to_string(j.get<std::int64_t>());
  } else if (j.is_number()) {
    out[prefix] = format_double(j.get<double>());
  } else {
    throw ConfigError(prefix + ": unsupported value type");
  }
}

}  // namespace detail

/// `key = value` lines; `#` starts a comment.
inline std::map<std::string, std::string> parse_key_values(const std::string& text) {
  std::map<std::string, std::string> out;
  std::stringstream ss(text);
  std::string line;
  int line_no = 0;
  while (std::getline(ss, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    require(eq != std::string::npos, "config line " + std::to_string(line_no) + ": expected key = value");
    out[detail::trim(line.substr(0, eq))] = detail::trim(line.substr(eq + 1));
  }
  return out;
}

inline std::map<std::string, std::string> parse_json_config(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  require(j.is_object(), "config: JSON top level must be an object");
  std::map<std::string, std::string> out;
  detail::flatten(j, "", out);
  return out;
}

inline RunConfig apply_entries(RunConfig c, const std::map<std::string, std::string>& entries) {
  using detail::parse_list;
  using detail::parse_number;
  for (const auto& [key, value] : entries) {
    if (key == "grid.n") c.n = parse_number<int>(key, value);
    else if (key == "modes.cutoff") c.cutoff = parse_number<int>(key, value);
    else if (key == "noise.lambda") c.lambda = parse_number<double>(key, value);
    else if (key == "noise.seed") c.seed = parse_number<std::uint64_t>(key, value);
    else if (key == "noise.scale") c.noise_scale = parse_number<double>(key, value);
    else if (key == "scheme.h") c.h = parse_number<double>(key, value);
    else if (key == "scheme.T") c.T = parse_number<double>(key, value);
    else if (key == "scheme.record_every") c.record_every = parse_number<int>(key, value);
    else if (key == "ensemble.paths") {
      const auto p = parse_number<long long>(key, value);
      require(p >= 1, "ensemble.paths must be >= 1");
      c.paths = static_cast<std::size_t>(p);
    } else if (key == "initial") c.initial = value;
    else if (key == "t_grid") c.t_grid = parse_list(key, value);
    else if (key == "eps_grid") c.eps_grid = parse_list(key, value);
    else if (key == "h_grid") c.h_grid = parse_list(key, value);
    else if (key == "levels") c.levels = parse_number<int>(key, value);
    else if (key == "probes") c.probes = parse_number<int>(key, value);
    else if (key == "alpha") c.alpha = parse_number<double>(key, value);
    else if (key == "delta") c.delta = parse_number<double>(key, value);
    else if (key == "bridge.pairs") c.bridge_pairs = parse_number<int>(key, value);
    else if (key == "bridge.samples") c.bridge_samples = value;
    else if (key == "output.dir") c.output_dir = value;
    else throw ConfigError("unknown config key: " + key);
  }
  return c;
}

/// JSON when the text starts with '{', key = value otherwise.
inline RunConfig parse_config(const std::string& text) {
  const std::string t = detail::trim(text);
  const bool json = !t.empty() && t.front() == '{';
  return apply_entries(RunConfig{}, json ? parse_json_config(t) : parse_key_values(t));
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), "--config: cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

/// Checks everything that can be checked before any computation starts.
inline void validate(const RunConfig& c) {
  validate(c.scheme());
  require(c.paths >= 1, "ensemble.paths must be >= 1");
  initial_condition(c.initial, make_grid(c.n));
  require(c.levels >= 2 && c.levels <= 5, "levels must lie in [2, 5]");
  require(c.probes >= 1, "probes must be >= 1");
  require(c.alpha > 0.0, "alpha must be positive");
  require(c.delta >= 0.0, "delta must be nonnegative");
  require(c.bridge_pairs >= 1, "bridge.pairs must be >= 1");
  for (double e : c.eps_grid) require(e >= 0.0, "eps_grid entries must be nonnegative");
  for (double h : c.h_grid) require(h > 0.0 && h < 1.0, "h_grid entries must lie in (0, 1)");
  for (double t : c.t_grid) require(t > 0.0, "t_grid entries must be positive");
}

}  // namespace rshe
