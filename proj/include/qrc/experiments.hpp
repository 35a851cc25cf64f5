// experiments.hpp -- sweeps over (J_s, f, coupling seed) and their outputs
//
// A sweep directory holds
//   cells.csv      one row per cell, sorted by (J_s, f, seed)
//   manifest.json  resolved config, fingerprint, code version, per-cell
//                  status and wall time
// Figure CSVs are derived from those two files alone, so `emit` works on a
// finished sweep without recomputing anything.

#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "qrc/config.hpp"
#include "qrc/csv.hpp"
#include "qrc/entanglement.hpp"
#include "qrc/learning.hpp"
#include "qrc/reservoir.hpp"
#include "qrc/rng.hpp"
#include "qrc/signals.hpp"
#include "qrc/version.hpp"

namespace qrc {

namespace fs = std::filesystem;

struct CellResult {
  double js = 0.0;
  double f = 0.0;
  std::size_t seed = 0;  // coupling-seed index
  std::uint64_t coupling_seed = 0;
  bool ok = false;
  std::string message;  // error text for failed cells
  double step = 0.0;    // RK4 step actually used
  CapacityProfile profile;
  EntanglementSummary entanglement;
  double wall_seconds = 0.0;
};

struct SweepResult {
  ExperimentConfig config;
  std::string fingerprint;
  std::vector<CellResult> cells;  // sorted by (J_s, f, seed)
};

struct CellKey {
  double js;
  double f;
  std::size_t seed;
};

/// Cells in output order. js_values and f_values are sorted by resolve().
inline std::vector<CellKey> sweep_cells(const ExperimentConfig& cfg) {
  std::vector<CellKey> keys;
  for (double js : cfg.js_values)
    for (double f : cfg.f_values)
      for (std::size_t s = 0; s < cfg.n_coupling_seeds; ++s) keys.push_back({js, f, s});
  return keys;
}

/// The nine input sequences for one f0. Phases depend only on (base_seed,
/// sequence id), so every f and every J_s sees the same draws.
inline std::vector<InputSequence> sweep_sequences(const ExperimentConfig& cfg, double f) {
  SignalSpec spec;
  spec.f0 = f;
  spec.time_axis = cfg.time_axis;
  return make_all_sequences(spec, cfg.base_seed);
}

inline SpinNetworkModel cell_model(const ExperimentConfig& cfg, const CellKey& key) {
  return make_model(key.js, stream_seed(cfg.base_seed, StreamTag::coupling, key.seed), cfg.n_qubits, cfg.h_z,
                    cfg.gamma, cfg.dissipator);
}

struct CellRecords {
  TrajectoryRecord train;
  TrajectoryRecord test;
};

/// One cell: train run (with entanglement sampling), test run, optional
/// validation run, capacity profile, steady-state entanglement of the train
/// run. Exceptions are captured into the result.
inline CellResult run_cell(const ExperimentConfig& cfg, const CellKey& key, const std::vector<InputSequence>& seqs,
                           CellRecords* keep = nullptr) {
  const auto t0 = std::chrono::steady_clock::now();
  CellResult r;
  r.js = key.js;
  r.f = key.f;
  r.seed = key.seed;
  r.coupling_seed = stream_seed(cfg.base_seed, StreamTag::coupling, key.seed);
  try {
    const SpinNetworkModel model = cell_model(cfg, key);
    const ReservoirEvolver evolver(model, cfg.run);
    r.step = evolver.step();

    RunConfig train_cfg = cfg.run;
    train_cfg.sample_entanglement = true;
    RunConfig quiet_cfg = cfg.run;
    quiet_cfg.sample_entanglement = false;

    auto train = run_reservoir(evolver, seqs.at(cfg.train_sequences.first), seqs.at(cfg.train_sequences.second), train_cfg);
    auto test = run_reservoir(evolver, seqs.at(cfg.test_sequences.first), seqs.at(cfg.test_sequences.second), quiet_cfg);
    std::optional<TrajectoryRecord> validation;
    if (cfg.lambda_selection == LambdaSelection::validation) {
      validation = run_reservoir(evolver, seqs.at(cfg.validation_sequences.first),
                                 seqs.at(cfg.validation_sequences.second), quiet_cfg);
    }
    r.profile = evaluate_capacity_profile(train, test, cfg.learning, cfg.run.washout_steps,
                                          validation ? &*validation : nullptr);
    r.entanglement = steady_state_average(train.entanglement, cfg.run.washout_steps);
    r.ok = true;
    if (keep) *keep = CellRecords{std::move(train), std::move(test)};
  } catch (const std::exception& e) {
    r.ok = false;
    r.message = e.what();
  }
  r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

// ---- cells.csv ---------------------------------------------------------

inline std::string cells_csv_header(std::size_t tau_max) {
  std::string h = "J_s,f,seed,coupling_seed,status,step,total";
  for (std::size_t t = 0; t <= tau_max; ++t) h += ",C_tau" + std::to_string(t);
  for (std::size_t t = 0; t <= tau_max; ++t) h += ",lambda_tau" + std::to_string(t);
  for (const auto& l : partition_labels()) h += "," + l;
  h += ",diff_single,diff_pair,ratio_single,ratio_pair,message";
  return h;
}

inline std::string cells_csv_row(const CellResult& c, std::size_t tau_max) {
  const double nan = std::nan("");
  std::ostringstream os;
  os << format_double(c.js) << ',' << format_double(c.f) << ',' << c.seed << ',' << c.coupling_seed << ','
     << (c.ok ? "ok" : "error") << ',' << format_double(c.ok ? c.step : nan) << ','
     << format_double(c.ok ? c.profile.total : nan);
  for (std::size_t t = 0; t <= tau_max; ++t) os << ',' << format_double(c.ok ? c.profile.per_tau.at(t) : nan);
  for (std::size_t t = 0; t <= tau_max; ++t) os << ',' << format_double(c.ok ? c.profile.lambda_per_tau.at(t) : nan);
  for (std::size_t p = 0; p < kPartitionCount; ++p) os << ',' << format_double(c.ok ? c.entanglement.mean[p] : nan);
  const auto& e = c.entanglement;
  os << ',' << format_double(c.ok ? e.diff_single : nan) << ',' << format_double(c.ok ? e.diff_pair : nan) << ','
     << format_double(c.ok ? e.ratio_single.value_or(nan) : nan) << ','
     << format_double(c.ok ? e.ratio_pair.value_or(nan) : nan) << ',' << sanitize_field(c.message);
  return os.str();
}

inline std::vector<CellResult> read_cells_csv(std::istream& is, std::size_t tau_max) {
  const CsvTable t = read_csv(is);
  const auto expected = split_csv_line(cells_csv_header(tau_max));
  if (t.header != expected) throw std::runtime_error("cells.csv: header does not match tau_max = " + std::to_string(tau_max));
  std::vector<CellResult> cells;
  for (const auto& row : t.rows) {
    std::size_t i = 0;
    CellResult c;
    c.js = parse_double(row[i++]);
    c.f = parse_double(row[i++]);
    c.seed = parse_size(row[i++]);
    c.coupling_seed = parse_size(row[i++]);
    c.ok = row[i++] == "ok";
    c.step = parse_double(row[i++]);
    c.profile.total = parse_double(row[i++]);
    for (std::size_t k = 0; k <= tau_max; ++k) c.profile.per_tau.push_back(parse_double(row[i++]));
    for (std::size_t k = 0; k <= tau_max; ++k) c.profile.lambda_per_tau.push_back(parse_double(row[i++]));
    std::array<double, kPartitionCount> m{};
    for (auto& v : m) v = parse_double(row[i++]);
    c.entanglement = EntanglementSummary::from_means(m);
    i += 4;  // aggregates are recomputed from the means
    c.message = row[i++];
    cells.push_back(std::move(c));
  }
  return cells;
}

// ---- sweep driver ------------------------------------------------------

struct SweepOptions {
  std::size_t threads = 1;
  // Receives cells.csv text as soon as the next cell in key order is done.
  std::ostream* cells_out = nullptr;
  std::function<void(std::size_t done, std::size_t total, const CellResult&)> progress;
};

inline SweepResult run_sweep(const ExperimentConfig& cfg, const SweepOptions& opt = {}) {
  const auto keys = sweep_cells(cfg);
  std::map<double, std::vector<InputSequence>> sequences;
  for (double f : cfg.f_values) sequences.emplace(f, sweep_sequences(cfg, f));

  SweepResult result;
  result.config = cfg;
  result.fingerprint = cfg.fingerprint();
  result.cells.resize(keys.size());
  std::vector<char> done(keys.size(), 0);

  std::mutex mu;
  std::size_t next_to_write = 0, finished = 0;
  if (opt.cells_out) *opt.cells_out << cells_csv_header(cfg.learning.tau_max) << '\n' << std::flush;

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < keys.size(); i = next++) {
      CellResult r = run_cell(cfg, keys[i], sequences.at(keys[i].f));
      std::lock_guard lock(mu);
      result.cells[i] = std::move(r);
      done[i] = 1;
      ++finished;
      if (opt.progress) opt.progress(finished, keys.size(), result.cells[i]);
      while (next_to_write < keys.size() && done[next_to_write]) {
        if (opt.cells_out) *opt.cells_out << cells_csv_row(result.cells[next_to_write], cfg.learning.tau_max) << '\n';
        ++next_to_write;
      }
      if (opt.cells_out) opt.cells_out->flush();
    }
  };
  const std::size_t n_threads = std::max<std::size_t>(1, std::min(opt.threads, keys.size()));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  return result;
}

// ---- manifest ----------------------------------------------------------

inline nlohmann::ordered_json manifest_json(const SweepResult& r) {
  nlohmann::ordered_json j;
  j["code_version"] = kVersion;
  j["config_fingerprint"] = r.fingerprint;
  j["experiment"] = to_string(r.config.experiment);
  nlohmann::ordered_json c;
  for (const auto& [k, v] : r.config.canonical()) c[k] = v;
  j["config"] = c;
  auto cells = nlohmann::ordered_json::array();
  for (const auto& cell : r.cells) {
    nlohmann::ordered_json e;
    e["J_s"] = cell.js;
    e["f"] = cell.f;
    e["seed"] = cell.seed;
    e["coupling_seed"] = cell.coupling_seed;
    e["status"] = cell.ok ? "ok" : "error";
    if (!cell.ok) e["message"] = cell.message;
    e["wall_time_s"] = cell.wall_seconds;
    cells.push_back(e);
  }
  j["cells"] = cells;
  return j;
}

inline void write_text_file(const fs::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << text;
  if (!os) throw std::runtime_error("write failed for " + path.string());
}

inline void write_manifest(const SweepResult& r, const fs::path& dir) {
  write_text_file(dir / "manifest.json", manifest_json(r).dump(2) + "\n");
}

inline void write_cells_csv(const SweepResult& r, const fs::path& path) {
  std::ostringstream os;
  os << cells_csv_header(r.config.learning.tau_max) << '\n';
  for (const auto& c : r.cells) os << cells_csv_row(c, r.config.learning.tau_max) << '\n';
  write_text_file(path, os.str());
}

/// Reloads a sweep written by write_cells_csv + write_manifest.
inline SweepResult read_sweep(const fs::path& dir) {
  std::ifstream mj(dir / "manifest.json");
  if (!mj) throw std::runtime_error("no manifest.json in " + dir.string());
  const auto j = nlohmann::json::parse(mj);
  ExperimentConfig cfg;
  for (const auto& [k, v] : j.at("config").items()) apply_setting(cfg, k, v.get<std::string>());
  cfg.resolve();

  SweepResult r;
  r.config = cfg;
  r.fingerprint = j.at("config_fingerprint").get<std::string>();
  if (r.fingerprint != cfg.fingerprint()) throw std::runtime_error("manifest.json: config fingerprint mismatch");
  std::ifstream cs(dir / "cells.csv");
  if (!cs) throw std::runtime_error("no cells.csv in " + dir.string());
  r.cells = read_cells_csv(cs, cfg.learning.tau_max);
  const auto& mcells = j.at("cells");
  if (mcells.size() == r.cells.size()) {
    for (std::size_t i = 0; i < r.cells.size(); ++i) r.cells[i].wall_seconds = mcells[i].value("wall_time_s", 0.0);
  }
  return r;
}

// ---- figure data -------------------------------------------------------

enum class Figure { fig2a, fig2b, fig2c, fig2d, fig2e, fig3, fig4 };

inline const std::vector<std::pair<Figure, std::string>>& figure_names() {
  static const std::vector<std::pair<Figure, std::string>> names{
      {Figure::fig2a, "fig2a"}, {Figure::fig2b, "fig2b"}, {Figure::fig2c, "fig2c"}, {Figure::fig2d, "fig2d"},
      {Figure::fig2e, "fig2e"}, {Figure::fig3, "fig3"},   {Figure::fig4, "fig4"}};
  return names;
}

inline std::string to_string(Figure f) {
  for (const auto& [k, n] : figure_names())
    if (k == f) return n;
  return "?";
}

inline Figure parse_figure(const std::string& s) {
  for (const auto& [k, n] : figure_names())
    if (n == s) return k;
  throw std::invalid_argument("unknown figure '" + s + "'");
}

struct MeanErr {
  double mean = 0.0;
  double stderr_ = 0.0;
};

/// Mean and standard error (sample deviation / sqrt(n); 0 for n = 1).
inline MeanErr mean_stderr(std::span<const double> v) {
  if (v.empty()) throw std::invalid_argument("mean_stderr: no values");
  MeanErr r;
  for (double x : v) r.mean += x;
  r.mean /= static_cast<double>(v.size());
  if (v.size() > 1) {
    double ss = 0.0;
    for (double x : v) ss += (x - r.mean) * (x - r.mean);
    r.stderr_ = std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
  }
  return r;
}

/// Seed aggregate of the successful cells at one (J_s, f).
struct CellGroup {
  double js = 0.0;
  double f = 0.0;
  std::size_t n_ok = 0;
  MeanErr total;
  std::vector<MeanErr> per_tau;
  std::array<MeanErr, kPartitionCount> partition{};
  EntanglementSummary entanglement;  // from seed-averaged means
};

inline std::vector<CellGroup> group_cells(const SweepResult& r) {
  std::map<std::pair<double, double>, std::vector<const CellResult*>> by_key;
  for (const auto& c : r.cells)
    if (c.ok) by_key[{c.js, c.f}].push_back(&c);
  std::vector<CellGroup> out;
  for (const auto& [key, cells] : by_key) {
    CellGroup g;
    g.js = key.first;
    g.f = key.second;
    g.n_ok = cells.size();
    std::vector<double> v;
    for (auto* c : cells) v.push_back(c->profile.total);
    g.total = mean_stderr(v);
    for (std::size_t t = 0; t <= r.config.learning.tau_max; ++t) {
      v.clear();
      for (auto* c : cells) v.push_back(c->profile.per_tau.at(t));
      g.per_tau.push_back(mean_stderr(v));
    }
    std::vector<EntanglementSummary> sums;
    for (auto* c : cells) sums.push_back(c->entanglement);
    for (std::size_t p = 0; p < kPartitionCount; ++p) {
      v.clear();
      for (auto* c : cells) v.push_back(c->entanglement.mean[p]);
      g.partition[p] = mean_stderr(v);
    }
    g.entanglement = seed_average(sums);
    out.push_back(std::move(g));
  }
  return out;  // ascending (J_s, f)
}

namespace detail {

inline std::string axis_suffix(const char* tag, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "_%s%g", tag, v);
  return buf;
}

inline std::vector<double> distinct(const std::vector<CellGroup>& groups, bool js_axis) {
  std::vector<double> v;
  for (const auto& g : groups) v.push_back(js_axis ? g.js : g.f);
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

}  // namespace detail

/// Writes the plot-ready CSV(s) for one panel into `dir`; returns the paths.
/// J_s panels get one file per f (suffix _f<value> when there are several),
/// fig4 one file per J_s likewise.
inline std::vector<fs::path> emit_figure_data(const SweepResult& r, Figure fig, const fs::path& dir) {
  const auto groups = group_cells(r);
  if (groups.empty()) throw std::runtime_error(to_string(fig) + ": sweep has no successful cells");
  const auto js_axis = detail::distinct(groups, true);
  const auto f_axis = detail::distinct(groups, false);
  const std::string name = to_string(fig);
  std::vector<fs::path> written;

  if (fig == Figure::fig4) {
    if (f_axis.size() < 2) throw std::runtime_error("fig4: needs at least two f values, sweep has " + std::to_string(f_axis.size()));
    for (double js : js_axis) {
      std::ostringstream os;
      os << "f,tau,capacity,capacity_stderr\n";
      for (const auto& g : groups) {
        if (g.js != js) continue;
        for (std::size_t t = 0; t < g.per_tau.size(); ++t) {
          os << format_double(g.f) << ',' << t << ',' << format_double(g.per_tau[t].mean) << ','
             << format_double(g.per_tau[t].stderr_) << '\n';
        }
      }
      const fs::path p = dir / (name + (js_axis.size() > 1 ? detail::axis_suffix("js", js) : "") + ".csv");
      write_text_file(p, os.str());
      written.push_back(p);
    }
    return written;
  }

  if (fig != Figure::fig3 && js_axis.size() < 2) {
    throw std::runtime_error(name + ": needs at least two J_s values, sweep has " + std::to_string(js_axis.size()));
  }
  for (double f : f_axis) {
    std::ostringstream os;
    switch (fig) {
      case Figure::fig2a: os << "J_s,capacity_mean,capacity_stderr\n"; break;
      case Figure::fig2b: os << "J_s,E1_mean,E1_stderr,E2_mean,E2_stderr,E3_mean,E3_stderr,E4_mean,E4_stderr,E_single_mean\n"; break;
      case Figure::fig2c: os << "J_s,E12_mean,E12_stderr,E13_mean,E13_stderr,E14_mean,E14_stderr\n"; break;
      case Figure::fig2d: os << "J_s,diff_single,diff_pair\n"; break;
      case Figure::fig2e: os << "J_s,ratio_single,ratio_pair\n"; break;
      case Figure::fig3: os << "J_s,tau,capacity,capacity_stderr\n"; break;
      case Figure::fig4: break;
    }
    const double nan = std::nan("");
    for (const auto& g : groups) {
      if (g.f != f) continue;
      const std::string js = format_double(g.js);
      const auto& e = g.entanglement;
      switch (fig) {
        case Figure::fig2a:
          os << js << ',' << format_double(g.total.mean) << ',' << format_double(g.total.stderr_) << '\n';
          break;
        case Figure::fig2b:
          os << js;
          for (std::size_t p = 0; p < 4; ++p)
            os << ',' << format_double(g.partition[p].mean) << ',' << format_double(g.partition[p].stderr_);
          os << ',' << format_double(e.mean_single()) << '\n';
          break;
        case Figure::fig2c:
          os << js;
          for (std::size_t p = 4; p < 7; ++p)
            os << ',' << format_double(g.partition[p].mean) << ',' << format_double(g.partition[p].stderr_);
          os << '\n';
          break;
        case Figure::fig2d:
          os << js << ',' << format_double(e.diff_single) << ',' << format_double(e.diff_pair) << '\n';
          break;
        case Figure::fig2e:
          os << js << ',' << format_double(e.ratio_single.value_or(nan)) << ','
             << format_double(e.ratio_pair.value_or(nan)) << '\n';
          break;
        case Figure::fig3:
          for (std::size_t t = 0; t < g.per_tau.size(); ++t) {
            os << js << ',' << t << ',' << format_double(g.per_tau[t].mean) << ','
               << format_double(g.per_tau[t].stderr_) << '\n';
          }
          break;
        case Figure::fig4: break;
      }
    }
    const fs::path p = dir / (name + (f_axis.size() > 1 ? detail::axis_suffix("f", f) : "") + ".csv");
    write_text_file(p, os.str());
    written.push_back(p);
  }
  return written;
}

/// Panels whose axes the sweep covers.
inline std::vector<Figure> available_figures(const SweepResult& r) {
  const auto groups = group_cells(r);
  std::vector<Figure> out;
  if (groups.empty()) return out;
  const auto js_axis = detail::distinct(groups, true);
  const auto f_axis = detail::distinct(groups, false);
  if (js_axis.size() >= 2) {
    for (auto f : {Figure::fig2a, Figure::fig2b, Figure::fig2c, Figure::fig2d, Figure::fig2e}) out.push_back(f);
  }
  out.push_back(Figure::fig3);
  if (f_axis.size() >= 2) out.push_back(Figure::fig4);
  return out;
}

/// The panels an experiment is meant to produce.
inline std::vector<Figure> experiment_figures(ExperimentKind e) {
  switch (e) {
    case ExperimentKind::sweep_js:
      return {Figure::fig2a, Figure::fig2b, Figure::fig2c, Figure::fig2d, Figure::fig2e};
    case ExperimentKind::memory_tail: return {Figure::fig3};
    case ExperimentKind::delay_dip: return {Figure::fig4};
    case ExperimentKind::single_run: return {};
  }
  return {};
}

// ---- single-run artifacts ---------------------------------------------

inline nlohmann::ordered_json capacity_json(const CapacityProfile& p, const std::string& fingerprint) {
  nlohmann::ordered_json j;
  j["config_fingerprint"] = fingerprint;
  j["total"] = p.total;
  j["per_tau"] = p.per_tau;
  j["lambda_chosen"] = p.lambda_per_tau;
  return j;
}

inline void write_entanglement_csv(std::ostream& os, const std::vector<CellResult>& cells) {
  const double nan = std::nan("");
  os << "J_s,seed";
  for (const auto& l : partition_labels()) os << ',' << l;
  os << ",diff_single,diff_pair,ratio_single,ratio_pair\n";
  for (const auto& c : cells) {
    if (!c.ok) continue;
    const auto& e = c.entanglement;
    os << format_double(c.js) << ',' << c.seed;
    for (double v : e.mean) os << ',' << format_double(v);
    os << ',' << format_double(e.diff_single) << ',' << format_double(e.diff_pair) << ','
       << format_double(e.ratio_single.value_or(nan)) << ',' << format_double(e.ratio_pair.value_or(nan)) << '\n';
  }
}

/// Test-set prediction at one delay: target index, target, readout output.
inline void write_prediction_csv(std::ostream& os, const CellRecords& rec, const ExperimentConfig& cfg,
                                 std::size_t tau) {
  const auto fit = best_fit_for_delay(rec.train, rec.test, tau, cfg.run.washout_steps, cfg.learning.lambda_grid,
                                      cfg.learning.alignment);
  const auto w = delay_window(tau, rec.test.steps(), cfg.run.washout_steps, cfg.learning.alignment);
  const auto y = fit.model.predict(window_rows(rec.test.features, w));
  const auto g = window_targets(rec.test.injected, tau, w);
  os << "k,target,prediction\n";
  for (std::size_t r = 0; r < w.rows; ++r) {
    os << (w.first + r + w.lead - tau) << ',' << format_double(g[r]) << ',' << format_double(y[r]) << '\n';
  }
}

/// Extra per-cell files of a single_run: trajectories, capacity profile
/// (CSV and JSON), prediction at the best delay, entanglement summary.
inline void write_single_run_artifacts(const SweepResult& r, const fs::path& dir) {
  const auto& cfg = r.config;
  std::ostringstream ent;
  write_entanglement_csv(ent, r.cells);
  write_text_file(dir / "entanglement.csv", ent.str());
  std::map<double, std::vector<InputSequence>> seqs;
  for (const auto& c : r.cells) {
    if (!c.ok) continue;
    if (!seqs.count(c.f)) seqs.emplace(c.f, sweep_sequences(cfg, c.f));
    CellRecords rec;
    const CellResult again = run_cell(cfg, {c.js, c.f, c.seed}, seqs.at(c.f), &rec);
    if (!again.ok) throw std::runtime_error("single_run: cell failed on re-run: " + again.message);
    const std::string tag = r.cells.size() > 1 ? detail::axis_suffix("js", c.js) + detail::axis_suffix("f", c.f) +
                                                     "_seed" + std::to_string(c.seed)
                                               : "";
    std::ostringstream os;
    write_trajectory_csv(os, rec.train);
    write_text_file(dir / ("trajectory_train" + tag + ".csv"), os.str());
    os.str("");
    write_trajectory_csv(os, rec.test);
    write_text_file(dir / ("trajectory_test" + tag + ".csv"), os.str());
    os.str("");
    write_capacity_csv(os, c.profile);
    write_text_file(dir / ("capacity" + tag + ".csv"), os.str());
    write_text_file(dir / ("capacity" + tag + ".json"), capacity_json(c.profile, r.fingerprint).dump(2) + "\n");
    os.str("");
    write_prediction_csv(os, rec, cfg, c.profile.best_tau());
    write_text_file(dir / ("prediction" + tag + ".csv"), os.str());
  }
}

}  // namespace qrc
