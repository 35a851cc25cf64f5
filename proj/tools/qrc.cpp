// qrc -- command-line driver for reservoir sweeps
//
//   qrc run <config>          sweep + figure data (+ per-cell files for single_run)
//   qrc sweep <config>        cells.csv and manifest.json only
//   qrc emit <dir>            figure CSVs from a finished sweep directory
//   qrc validate              quick invariant suite
//   qrc gen-signals           export the nine input sequences
//
// Exit status: 0 ok, 1 runtime failure, 2 bad config or arguments.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "qrc/config.hpp"
#include "qrc/experiments.hpp"
#include "qrc/signals.hpp"
#include "qrc/validation.hpp"
#include "qrc/version.hpp"

namespace fs = std::filesystem;

namespace {

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::size_t threads = 0;
};

qrc::ExperimentConfig load(const std::string& path, const Overrides& o) {
  qrc::ExperimentConfig cfg = qrc::load_config(path);
  if (o.seed) cfg.base_seed = *o.seed;
  if (o.out) cfg.output_dir = *o.out;
  return cfg;
}

std::size_t thread_count(std::size_t requested) {
  if (requested) return requested;
  return std::max(1U, std::thread::hardware_concurrency());
}

qrc::SweepResult sweep_to_dir(const qrc::ExperimentConfig& cfg, std::size_t threads) {
  const fs::path dir = cfg.output_dir;
  fs::create_directories(dir);
  const fs::path partial = dir / "cells.csv.partial";
  std::ofstream cells(partial, std::ios::binary);
  if (!cells) throw std::runtime_error("cannot write " + partial.string());

  qrc::SweepOptions opt;
  opt.threads = threads;
  opt.cells_out = &cells;
  opt.progress = [](std::size_t done, std::size_t total, const qrc::CellResult& c) {
    std::fprintf(stderr, "[%zu/%zu] J_s=%g f=%g seed=%zu %s", done, total, c.js, c.f, c.seed,
                 c.ok ? "ok" : "FAILED");
    if (c.ok) std::fprintf(stderr, " total=%.4f", c.profile.total);
    else std::fprintf(stderr, " (%s)", c.message.c_str());
    std::fprintf(stderr, " %.1fs\n", c.wall_seconds);
  };
  std::fprintf(stderr, "%s: %zu cells, %zu thread(s), fingerprint %s\n", qrc::to_string(cfg.experiment).c_str(),
               qrc::sweep_cells(cfg).size(), threads, cfg.fingerprint().c_str());
  auto result = qrc::run_sweep(cfg, opt);
  cells.close();
  fs::rename(partial, dir / "cells.csv");
  qrc::write_manifest(result, dir);
  std::size_t failed = 0;
  for (const auto& c : result.cells) failed += c.ok ? 0 : 1;
  if (failed) std::fprintf(stderr, "warning: %zu cell(s) failed, see manifest.json\n", failed);
  return result;
}

void emit(const qrc::SweepResult& r, const std::vector<qrc::Figure>& figs, const fs::path& dir) {
  for (auto f : figs)
    for (const auto& p : qrc::emit_figure_data(r, f, dir)) std::fprintf(stderr, "wrote %s\n", p.string().c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantum reservoir sweeps"};
  app.set_version_flag("--version", qrc::kVersion);
  app.require_subcommand(1);

  Overrides ov;
  std::string config_path;

  auto add_overrides = [&](CLI::App* sub) {
    sub->add_option("config", config_path, "experiment config file")->required();
    sub->add_option("--seed", ov.seed, "override base_seed");
    sub->add_option("--out", ov.out, "override output_dir");
    sub->add_option("--threads", ov.threads, "worker threads (0: all cores)");
  };

  auto* run = app.add_subcommand("run", "run an experiment and write its figure data");
  add_overrides(run);
  auto* sweep = app.add_subcommand("sweep", "run the sweep cells only");
  add_overrides(sweep);

  auto* emit_cmd = app.add_subcommand("emit", "write figure CSVs from a sweep directory");
  std::string emit_dir;
  std::string figure = "all";
  std::optional<std::string> emit_out;
  emit_cmd->add_option("dir", emit_dir, "sweep output directory")->required();
  emit_cmd->add_option("--figure", figure, "fig2a..fig2e, fig3, fig4 or all");
  emit_cmd->add_option("--out", emit_out, "directory for the figure files (default: the sweep directory)");

  auto* validate = app.add_subcommand("validate", "run the invariant suite");
  auto* gen = app.add_subcommand("gen-signals", "export the nine input sequences");
  double gen_f = 2.0;
  std::uint64_t gen_seed = qrc::ExperimentConfig{}.base_seed;
  std::string gen_out = "signals";
  std::string gen_axis = "index";
  gen->add_option("--f", gen_f, "f0");
  gen->add_option("--seed", gen_seed, "base seed");
  gen->add_option("--out", gen_out, "output directory");
  gen->add_option("--time-axis", gen_axis, "index or unit_interval");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (run->parsed() || sweep->parsed()) {
      const auto cfg = load(config_path, ov);
      const auto result = sweep_to_dir(cfg, thread_count(ov.threads));
      if (run->parsed()) {
        emit(result, qrc::experiment_figures(cfg.experiment), cfg.output_dir);
        if (cfg.experiment == qrc::ExperimentKind::single_run) qrc::write_single_run_artifacts(result, cfg.output_dir);
      }
    } else if (emit_cmd->parsed()) {
      const auto result = qrc::read_sweep(emit_dir);
      const fs::path out = emit_out ? fs::path(*emit_out) : fs::path(emit_dir);
      fs::create_directories(out);
      emit(result, figure == "all" ? qrc::available_figures(result) : std::vector{qrc::parse_figure(figure)}, out);
    } else if (validate->parsed()) {
      return qrc::run_validation_suite(std::cout) ? 0 : 1;
    } else if (gen->parsed()) {
      qrc::SignalSpec spec;
      spec.f0 = gen_f;
      spec.time_axis = qrc::parse_time_axis(gen_axis);
      fs::create_directories(gen_out);
      const auto seqs = qrc::make_all_sequences(spec, gen_seed);
      for (const auto& s : seqs) {
        const fs::path p = fs::path(gen_out) / ("sequence_" + std::to_string(s.sequence_id) + ".csv");
        std::ofstream os(p, std::ios::binary);
        qrc::write_sequence_csv(os, s);
        if (!os) throw std::runtime_error("cannot write " + p.string());
      }
      std::fprintf(stderr, "wrote %zu sequences to %s\n", seqs.size(), gen_out.c_str());
    }
  } catch (const qrc::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
