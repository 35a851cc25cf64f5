// config.hpp -- flat key = value experiment configuration
//
// One setting per line, '#' starts a comment. Lists are comma separated;
// a J_s / f list may also be written logspace(lo, hi, points). Unset lists
// fall back to per-experiment defaults when the config is resolved. See
// configs/*.conf for complete examples.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "qrc/csv.hpp"
#include "qrc/dynamics.hpp"
#include "qrc/learning.hpp"
#include "qrc/reservoir.hpp"
#include "qrc/signals.hpp"

namespace qrc {

enum class ExperimentKind { sweep_js, memory_tail, delay_dip, single_run };

inline std::string to_string(ExperimentKind e) {
  switch (e) {
    case ExperimentKind::sweep_js: return "sweep_js";
    case ExperimentKind::memory_tail: return "memory_tail";
    case ExperimentKind::delay_dip: return "delay_dip";
    case ExperimentKind::single_run: return "single_run";
  }
  return "?";
}

inline ExperimentKind parse_experiment(const std::string& s) {
  if (s == "sweep_js") return ExperimentKind::sweep_js;
  if (s == "memory_tail") return ExperimentKind::memory_tail;
  if (s == "delay_dip") return ExperimentKind::delay_dip;
  if (s == "single_run") return ExperimentKind::single_run;
  throw std::invalid_argument("unknown experiment '" + s + "'");
}

enum class LambdaSelection { test, validation };

class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::size_t line, const std::string& msg)
      : std::runtime_error(line ? "line " + std::to_string(line) + ": " + msg : msg), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

inline std::vector<double> default_js_grid() { return log_grid(0.005, 75.0, 20); }

struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::sweep_js;
  std::vector<double> js_values;  // empty: experiment default
  std::vector<double> f_values;   // empty: experiment default
  std::size_t n_coupling_seeds = 10;
  std::uint64_t base_seed = 20251015;

  std::size_t n_qubits = 4;
  double h_z = 1.5;
  double gamma = 0.01;
  DissipatorConvention dissipator = DissipatorConvention::paper;

  RunConfig run;
  LearningConfig learning;
  double lambda_min = 1e-10;
  double lambda_max = 1e2;
  std::size_t lambda_points = 21;
  LambdaSelection lambda_selection = LambdaSelection::test;

  TimeAxis time_axis = TimeAxis::index;
  std::pair<std::size_t, std::size_t> train_sequences{0, 1};
  std::pair<std::size_t, std::size_t> test_sequences{2, 3};
  std::pair<std::size_t, std::size_t> validation_sequences{4, 5};

  std::string output_dir = "out";

  /// Fills experiment-dependent defaults and rebuilds the lambda grid.
  void resolve() {
    auto sort_unique = [](std::vector<double>& v) {
      std::sort(v.begin(), v.end());
      v.erase(std::unique(v.begin(), v.end()), v.end());
    };
    if (js_values.empty()) {
      switch (experiment) {
        case ExperimentKind::sweep_js: js_values = default_js_grid(); break;
        case ExperimentKind::memory_tail: js_values = {0.005, 0.325, 6.0, 75.0}; break;
        case ExperimentKind::delay_dip: js_values = {1.5}; break;
        case ExperimentKind::single_run: js_values = {0.1}; break;
      }
    }
    if (f_values.empty()) {
      f_values = experiment == ExperimentKind::delay_dip ? std::vector<double>{1.0, 2.0, 3.0} : std::vector<double>{2.0};
    }
    sort_unique(js_values);
    sort_unique(f_values);
    learning.lambda_grid = log_grid(lambda_min, lambda_max, lambda_points);
  }

  void validate() const {
    for (double js : js_values)
      if (!(js >= 0.0)) throw ConfigError(0, "js_values must be non-negative");
    for (double f : f_values)
      if (!(f > 0.0)) throw ConfigError(0, "f_values must be positive");
    if (n_coupling_seeds < 1) throw ConfigError(0, "n_coupling_seeds must be at least 1");
    if (n_qubits < 4) throw ConfigError(0, "n_qubits must be at least 4");
    if (!(gamma >= 0.0)) throw ConfigError(0, "gamma must be non-negative");
    auto check_pair = [this](std::pair<std::size_t, std::size_t> p, const char* what) {
      if (p.first >= kSequenceCount || p.second >= kSequenceCount || p.first == p.second) {
        throw ConfigError(0, std::string(what) + " must be two distinct ids in 0..8");
      }
    };
    check_pair(train_sequences, "train_sequences");
    check_pair(test_sequences, "test_sequences");
    check_pair(validation_sequences, "validation_sequences");
    if (run.input_qubits.first >= n_qubits || run.input_qubits.second >= n_qubits) {
      throw ConfigError(0, "input_qubits out of range");
    }
    try {
      run.validate(learning.tau_max);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(0, e.what());
    }
    if (run.injection_count() > kSequenceLength) throw ConfigError(0, "more injections than samples per sequence");
  }

  /// Every semantically meaningful field as ordered key/value text. Output
  /// location and thread count are not part of it.
  std::map<std::string, std::string> canonical() const {
    auto list = [](const std::vector<double>& v) {
      std::string s;
      for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + format_double(v[i]);
      return s;
    };
    auto pair = [](std::pair<std::size_t, std::size_t> p) {
      return std::to_string(p.first) + "," + std::to_string(p.second);
    };
    std::map<std::string, std::string> m;
    m["experiment"] = to_string(experiment);
    m["js_values"] = list(js_values);
    m["f_values"] = list(f_values);
    m["n_coupling_seeds"] = std::to_string(n_coupling_seeds);
    m["base_seed"] = std::to_string(base_seed);
    m["n_qubits"] = std::to_string(n_qubits);
    m["h_z"] = format_double(h_z);
    m["gamma"] = format_double(gamma);
    m["dissipator_convention"] = to_string(dissipator);
    m["t_final"] = format_double(run.t_final);
    m["delta_t"] = format_double(run.delta_t);
    m["dt"] = format_double(run.dt);
    m["washout_steps"] = std::to_string(run.washout_steps);
    m["input_qubits"] = pair(run.input_qubits);
    m["tau_max"] = std::to_string(learning.tau_max);
    m["lambda_min"] = format_double(lambda_min);
    m["lambda_max"] = format_double(lambda_max);
    m["lambda_points"] = std::to_string(lambda_points);
    m["lambda_selection"] = lambda_selection == LambdaSelection::test ? "test" : "validation";
    m["readout_alignment"] = to_string(learning.alignment);
    m["time_axis"] = to_string(time_axis);
    m["train_sequences"] = pair(train_sequences);
    m["test_sequences"] = pair(test_sequences);
    m["validation_sequences"] = pair(validation_sequences);
    return m;
  }

  std::string canonical_text() const {
    std::string s;
    for (const auto& [k, v] : canonical()) s += k + " = " + v + "\n";
    return s;
  }

  /// FNV-1a 64 over canonical_text(), as 16 hex digits.
  std::string fingerprint() const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : canonical_text()) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  return out;
}

inline double to_double(const std::string& s) {
  const double v = parse_double(s);
  if (!std::isfinite(v)) throw std::invalid_argument("expected a finite number, got '" + s + "'");
  return v;
}

inline std::size_t to_size(const std::string& s) { return parse_size(s); }

inline bool to_bool(const std::string& s) {
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw std::invalid_argument("expected true/false, got '" + s + "'");
}

inline std::vector<double> to_double_list(const std::string& s) {
  if (s.rfind("logspace(", 0) == 0 && s.back() == ')') {
    const auto args = split_list(s.substr(9, s.size() - 10));
    if (args.size() != 3) throw std::invalid_argument("logspace(lo, hi, points) takes three arguments");
    return log_grid(to_double(args[0]), to_double(args[1]), to_size(args[2]));
  }
  std::vector<double> v;
  for (const auto& item : split_list(s)) v.push_back(to_double(item));
  if (v.empty()) throw std::invalid_argument("empty list");
  return v;
}

inline std::pair<std::size_t, std::size_t> to_pair(const std::string& s) {
  const auto items = split_list(s);
  if (items.size() != 2) throw std::invalid_argument("expected two comma-separated integers");
  return {to_size(items[0]), to_size(items[1])};
}

}  // namespace detail

/// Applies one `key = value` setting. Throws std::invalid_argument for an
/// unknown key or malformed value.
inline void apply_setting(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
  using namespace detail;
  if (key == "experiment") cfg.experiment = parse_experiment(value);
  else if (key == "js_values") cfg.js_values = to_double_list(value);
  else if (key == "f_values") cfg.f_values = to_double_list(value);
  else if (key == "n_coupling_seeds") cfg.n_coupling_seeds = to_size(value);
  else if (key == "base_seed") cfg.base_seed = to_size(value);
  else if (key == "n_qubits") cfg.n_qubits = to_size(value);
  else if (key == "h_z") cfg.h_z = to_double(value);
  else if (key == "gamma") cfg.gamma = to_double(value);
  else if (key == "dissipator_convention") cfg.dissipator = parse_dissipator(value);
  else if (key == "t_final") cfg.run.t_final = to_double(value);
  else if (key == "delta_t") cfg.run.delta_t = to_double(value);
  else if (key == "dt") cfg.run.dt = to_double(value);
  else if (key == "washout_steps") cfg.run.washout_steps = to_size(value);
  else if (key == "input_qubits") cfg.run.input_qubits = to_pair(value);
  else if (key == "tau_max") cfg.learning.tau_max = to_size(value);
  else if (key == "lambda_min") cfg.lambda_min = to_double(value);
  else if (key == "lambda_max") cfg.lambda_max = to_double(value);
  else if (key == "lambda_points") cfg.lambda_points = to_size(value);
  else if (key == "lambda_selection") {
    if (value == "test") cfg.lambda_selection = LambdaSelection::test;
    else if (value == "validation") cfg.lambda_selection = LambdaSelection::validation;
    else throw std::invalid_argument("lambda_selection must be 'test' or 'validation'");
  } else if (key == "readout_alignment") cfg.learning.alignment = parse_alignment(value);
  else if (key == "time_axis") cfg.time_axis = parse_time_axis(value);
  else if (key == "train_sequences") cfg.train_sequences = to_pair(value);
  else if (key == "test_sequences") cfg.test_sequences = to_pair(value);
  else if (key == "validation_sequences") cfg.validation_sequences = to_pair(value);
  else if (key == "output_dir") cfg.output_dir = value;
  else throw std::invalid_argument("unknown key '" + key + "'");
}

inline ExperimentConfig parse_config(std::istream& is) {
  ExperimentConfig cfg;
  std::string line;
  std::size_t lineno = 0;
  std::map<std::string, std::size_t> seen;
  while (std::getline(is, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(lineno, "expected 'key = value'");
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(lineno, "missing key");
    if (value.empty()) throw ConfigError(lineno, "missing value for '" + key + "'");
    if (auto it = seen.find(key); it != seen.end()) {
      throw ConfigError(lineno, "duplicate key '" + key + "' (first set on line " + std::to_string(it->second) + ")");
    }
    seen[key] = lineno;
    try {
      apply_setting(cfg, key, value);
    } catch (const std::exception& e) {
      throw ConfigError(lineno, e.what());
    }
  }
  cfg.resolve();
  cfg.validate();
  return cfg;
}

inline ExperimentConfig parse_config_string(const std::string& text) {
  std::istringstream is(text);
  return parse_config(is);
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError(0, "cannot open config file '" + path + "'");
  return parse_config(is);
}

}  // namespace qrc
