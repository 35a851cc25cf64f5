#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "qrc/experiments.hpp"

using namespace qrc;

namespace {

const fs::path kSource = QRC_SOURCE_DIR;
const std::string kCli = QRC_CLI;

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

CsvTable read_table(const fs::path& p) {
  std::ifstream is(p);
  return read_csv(is);
}

int run_cli(const std::string& args) {
  const int rc = std::system((kCli + " " + args + " >/dev/null 2>&1").c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("qrc_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

ExperimentConfig short_config(std::vector<double> js, std::vector<double> f, std::size_t seeds) {
  ExperimentConfig cfg;
  cfg.js_values = std::move(js);
  cfg.f_values = std::move(f);
  cfg.n_coupling_seeds = seeds;
  cfg.run.t_final = 750;
  cfg.run.washout_steps = 20;
  cfg.resolve();
  cfg.validate();
  return cfg;
}

std::string cells_text(const SweepResult& r) {
  std::ostringstream os;
  os << cells_csv_header(r.config.learning.tau_max) << '\n';
  for (const auto& c : r.cells) os << cells_csv_row(c, r.config.learning.tau_max) << '\n';
  return os.str();
}

std::string config_error(const std::string& text) {
  try {
    parse_config_string(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(Config, ParsesKeysCommentsAndLogspace) {
  const auto cfg = parse_config_string(
      "# comment\n"
      "experiment = memory_tail   # trailing\n"
      "\n"
      "js_values = logspace(0.01, 1, 3)\n"
      "f_values = 3, 1\n"
      "n_coupling_seeds = 4\n"
      "readout_alignment = post_evolution\n"
      "dissipator_convention = sigma_minus\n");
  EXPECT_EQ(cfg.experiment, ExperimentKind::memory_tail);
  ASSERT_EQ(cfg.js_values.size(), 3U);
  EXPECT_NEAR(cfg.js_values[1], 0.1, 1e-15);
  EXPECT_EQ(cfg.f_values, (std::vector<double>{1, 3}));
  EXPECT_EQ(cfg.n_coupling_seeds, 4U);
  EXPECT_EQ(cfg.learning.alignment, ReadoutAlignment::post_evolution);
  EXPECT_EQ(cfg.dissipator, DissipatorConvention::sigma_minus);
  EXPECT_EQ(cfg.learning.lambda_grid.size(), 21U);
}

TEST(Config, ExperimentDefaults) {
  EXPECT_EQ(parse_config_string("experiment = sweep_js\n").js_values.size(), 20U);
  EXPECT_EQ(parse_config_string("experiment = memory_tail\n").js_values, (std::vector<double>{0.005, 0.325, 6, 75}));
  const auto dip = parse_config_string("experiment = delay_dip\n");
  EXPECT_EQ(dip.js_values, std::vector<double>{1.5});
  EXPECT_EQ(dip.f_values, (std::vector<double>{1, 2, 3}));
  EXPECT_EQ(parse_config_string("experiment = single_run\n").f_values, std::vector<double>{2});
}

TEST(Config, ErrorsCarryLineNumbers) {
  EXPECT_NE(config_error("experiment = sweep_js\n\nbogus_key = 1\n").find("line 3"), std::string::npos);
  EXPECT_NE(config_error("h_z = 1\nh_z = 2\n").find("line 2"), std::string::npos);
  EXPECT_NE(config_error("gamma =\n").find("line 1"), std::string::npos);
  EXPECT_NE(config_error("# ok\njust words\n").find("line 2"), std::string::npos);
  EXPECT_NE(config_error("t_final = abc\n").find("line 1"), std::string::npos);
  EXPECT_NE(config_error("experiment = sweep_everything\n").find("line 1"), std::string::npos);
  EXPECT_FALSE(config_error("washout_steps = 400\n").empty());  // longer than the run
  EXPECT_FALSE(config_error("train_sequences = 1, 1\n").empty());
  EXPECT_FALSE(config_error("js_values = -1\n").empty());
  EXPECT_THROW(load_config("/nonexistent/qrc.conf"), ConfigError);
}

TEST(Config, FingerprintTracksEverySemanticField) {
  const ExperimentConfig base = parse_config_string("experiment = sweep_js\n");
  const std::vector<std::pair<std::string, std::string>> edits{
      {"js_values", "0.1, 0.2"},       {"f_values", "3"},
      {"n_coupling_seeds", "3"},       {"base_seed", "7"},
      {"h_z", "1.25"},                 {"gamma", "0.02"},
      {"dissipator_convention", "sigma_minus"},
      {"t_final", "2000"},             {"delta_t", "5"},
      {"dt", "0.01"},                  {"washout_steps", "60"},
      {"input_qubits", "1, 2"},        {"tau_max", "10"},
      {"lambda_min", "1e-8"},          {"lambda_max", "10"},
      {"lambda_points", "11"},         {"lambda_selection", "validation"},
      {"readout_alignment", "post_evolution"},
      {"time_axis", "unit_interval"},  {"train_sequences", "5, 6"},
      {"test_sequences", "7, 8"},      {"validation_sequences", "0, 8"}};
  std::set<std::string> seen{base.fingerprint()};
  for (const auto& [k, v] : edits) {
    const auto cfg = parse_config_string("experiment = sweep_js\n" + k + " = " + v + "\n");
    EXPECT_TRUE(seen.insert(cfg.fingerprint()).second) << k;
  }
  const auto moved = parse_config_string("experiment = sweep_js\noutput_dir = elsewhere\n");
  EXPECT_EQ(moved.fingerprint(), base.fingerprint());
  EXPECT_EQ(base.fingerprint().size(), 16U);
}

TEST(Sweep, SingleCellMatchesDirectPipeline) {
  const auto cfg = short_config({0.325}, {2}, 1);
  const auto r = run_sweep(cfg);
  ASSERT_EQ(r.cells.size(), 1U);
  ASSERT_TRUE(r.cells[0].ok) << r.cells[0].message;

  const auto seqs = make_all_sequences(SignalSpec{}, cfg.base_seed);
  const auto model = make_model(0.325, stream_seed(cfg.base_seed, StreamTag::coupling, 0));
  const ReservoirEvolver ev(model, cfg.run);
  const auto train = run_reservoir(ev, seqs[0], seqs[1], cfg.run);
  const auto test = run_reservoir(ev, seqs[2], seqs[3], cfg.run);
  const auto p = evaluate_capacity_profile(train, test, cfg.learning, cfg.run.washout_steps);
  EXPECT_EQ(r.cells[0].profile.per_tau, p.per_tau);
  EXPECT_EQ(r.cells[0].profile.total, p.total);
  const auto e = steady_state_average(train.entanglement, cfg.run.washout_steps);
  EXPECT_EQ(r.cells[0].entanglement.mean, e.mean);
}

TEST(Sweep, DeterministicAcrossRunsAndThreadCounts) {
  const auto cfg = short_config({0.325, 6}, {2}, 2);
  const auto a = cells_text(run_sweep(cfg));
  const auto b = cells_text(run_sweep(cfg));
  std::ostringstream streamed;
  SweepOptions opt;
  opt.threads = 3;
  opt.cells_out = &streamed;
  const auto c = cells_text(run_sweep(cfg, opt));
  EXPECT_EQ(a, b);
  EXPECT_EQ(a, c);
  EXPECT_EQ(a, streamed.str());
}

TEST(Sweep, CellsCsvRoundTrip) {
  const auto r = run_sweep(short_config({0.325, 6}, {2}, 1));
  std::istringstream is(cells_text(r));
  SweepResult back = r;
  back.cells = read_cells_csv(is, r.config.learning.tau_max);
  EXPECT_EQ(cells_text(back), cells_text(r));
}

TEST(Sweep, FailedCellIsRecordedNotFatal) {
  auto cfg = short_config({0.325}, {2}, 1);
  cfg.train_sequences = {0, 42};  // bypasses validate(): the cell must report the failure itself
  const auto r = run_sweep(cfg);
  ASSERT_EQ(r.cells.size(), 1U);
  EXPECT_FALSE(r.cells[0].ok);
  EXPECT_FALSE(r.cells[0].message.empty());
  EXPECT_NE(cells_text(r).find("error"), std::string::npos);
}

TEST(Sweep, IntermediateCouplingHasMostCapacity) {
  ExperimentConfig cfg;
  cfg.js_values = {0.005, 0.325, 6};
  cfg.n_coupling_seeds = 2;
  cfg.resolve();
  const auto groups = group_cells(run_sweep(cfg));
  ASSERT_EQ(groups.size(), 3U);
  EXPECT_GT(groups[1].total.mean, groups[0].total.mean);
  EXPECT_GT(groups[1].total.mean, groups[2].total.mean);
}

TEST(Figures, SchemasOrderingAndDerivedColumns) {
  const auto r = run_sweep(short_config({6, 0.325, 1}, {2}, 2));
  const auto dir = scratch("figs");
  for (auto fig : available_figures(r)) emit_figure_data(r, fig, dir);

  const auto a = read_table(dir / "fig2a.csv");
  EXPECT_EQ(a.header, (std::vector<std::string>{"J_s", "capacity_mean", "capacity_stderr"}));
  ASSERT_EQ(a.rows.size(), 3U);
  for (std::size_t i = 1; i < a.rows.size(); ++i) EXPECT_LT(parse_double(a.rows[i - 1][0]), parse_double(a.rows[i][0]));

  // fig2d from the fig2b / fig2c means.
  const auto b = read_table(dir / "fig2b.csv"), c = read_table(dir / "fig2c.csv"), d = read_table(dir / "fig2d.csv");
  for (std::size_t i = 0; i < 3; ++i) {
    auto col = [&](const CsvTable& t, const char* name) { return parse_double(t.rows[i][t.column(name)]); };
    EXPECT_NEAR(col(d, "diff_single"), col(b, "E1_mean") + col(b, "E2_mean") - col(b, "E3_mean") - col(b, "E4_mean"), 1e-14);
    EXPECT_NEAR(col(d, "diff_pair"), col(c, "E13_mean") + col(c, "E14_mean") - 2 * col(c, "E12_mean"), 1e-14);
    const double single = (col(b, "E1_mean") + col(b, "E2_mean") + col(b, "E3_mean") + col(b, "E4_mean")) / 4;
    EXPECT_NEAR(col(b, "E_single_mean"), single, 1e-14);
  }
  EXPECT_EQ(read_table(dir / "fig3.csv").rows.size(), 3U * 25U);
  EXPECT_THROW(emit_figure_data(r, Figure::fig4, dir), std::runtime_error);
}

TEST(Figures, Fig4BlocksPerF) {
  const auto r = run_sweep(short_config({1.5}, {1, 2}, 1));
  const auto dir = scratch("fig4");
  EXPECT_THROW(emit_figure_data(r, Figure::fig2a, dir), std::runtime_error);
  const auto paths = emit_figure_data(r, Figure::fig4, dir);
  ASSERT_EQ(paths.size(), 1U);
  const auto t = read_table(paths[0]);
  EXPECT_EQ(t.header, (std::vector<std::string>{"f", "tau", "capacity", "capacity_stderr"}));
  ASSERT_EQ(t.rows.size(), 50U);
  for (std::size_t i = 0; i < 50; ++i) {
    EXPECT_EQ(parse_double(t.rows[i][0]), i < 25 ? 1.0 : 2.0);
    EXPECT_EQ(parse_size(t.rows[i][1]), i % 25);
  }
}

TEST(Figures, MeanAndStandardError) {
  const std::vector<double> v{1, 2, 3, 4};
  const auto m = mean_stderr(v);
  EXPECT_DOUBLE_EQ(m.mean, 2.5);
  EXPECT_NEAR(m.stderr_, std::sqrt(5.0 / 3.0) / 2.0, 1e-15);
  EXPECT_EQ(mean_stderr(std::vector<double>{7}).stderr_, 0.0);
}

TEST(Manifest, RoundTripAndFingerprintCheck) {
  const auto r = run_sweep(short_config({0.325}, {2}, 1));
  const auto dir = scratch("manifest");
  write_cells_csv(r, dir / "cells.csv");
  write_manifest(r, dir);
  const auto back = read_sweep(dir);
  EXPECT_EQ(back.fingerprint, r.fingerprint);
  EXPECT_EQ(cells_text(back), cells_text(r));
  const auto j = nlohmann::json::parse(slurp(dir / "manifest.json"));
  EXPECT_EQ(j.at("code_version"), kVersion);
  EXPECT_EQ(j.at("cells").size(), 1U);

  auto text = slurp(dir / "manifest.json");
  text.replace(text.find(r.fingerprint), 16, "0000000000000000");
  write_text_file(dir / "manifest.json", text);
  EXPECT_THROW(read_sweep(dir), std::runtime_error);
}

TEST(Cli, ValidateSucceeds) { EXPECT_EQ(run_cli("validate"), 0); }

TEST(Cli, BadInvocationsExitWithUsageCode) {
  const auto dir = scratch("cli_bad");
  EXPECT_EQ(run_cli("run /nonexistent/qrc.conf"), 2);
  std::ofstream(dir / "bad.conf") << "experiment = sweep_js\nnot a setting\n";
  EXPECT_EQ(run_cli("run " + (dir / "bad.conf").string()), 2);
  EXPECT_EQ(run_cli("no-such-command"), 2);
}

TEST(Cli, TinySweepMatchesGoldenFiles) {
  const auto dir = scratch("cli_tiny");
  ASSERT_EQ(run_cli("sweep " + (kSource / "configs/tiny.conf").string() + " --out " + (dir / "sweep").string()), 0);
  ASSERT_EQ(run_cli("emit " + (dir / "sweep").string() + " --figure all --out " + (dir / "figs").string()), 0);
  const fs::path golden = kSource / "tests/golden/tiny";
  EXPECT_EQ(slurp(dir / "sweep/cells.csv"), slurp(golden / "cells.csv"));
  for (const char* f : {"fig2a.csv", "fig2b.csv", "fig2c.csv", "fig2d.csv", "fig2e.csv"})
    EXPECT_EQ(slurp(dir / "figs" / f), slurp(golden / f)) << f;
}
