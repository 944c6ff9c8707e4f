#include "lsekit/benchlab.hpp"
#include "lsekit/error.hpp"
#include "lsekit/runner/aggregate.hpp"
#include "lsekit/runner/bound_check.hpp"
#include "lsekit/runner/config.hpp"
#include "lsekit/runner/csv_io.hpp"
#include "lsekit/runner/experiment.hpp"
#include "lsekit/runner/plot.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using namespace lsekit;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct RunArgs {
  std::string config;
  int seeds = 0;
  int iterations = 0;
  std::string out = ".";
  bool wall_time = false;
};

int cmd_run(const RunArgs& a) {
  run::ExperimentConfig cfg = run::load_config(a.config);
  if (a.seeds > 0) cfg.n_seeds = a.seeds;
  if (a.iterations > 0) cfg.iterations = a.iterations;
  cfg.validate();
  const fs::path out = a.out;
  fs::create_directories(out);

  run::RunOptions opts;
  opts.record_wall_ms = a.wall_time;
  std::vector<run::Summary> summaries;
  int failed_seeds = 0;
  bool all_numerical = true;
  int total_seeds = 0;
  for (const auto& spec : cfg.acquisitions) {
    const run::RunRecord rec = run::run_acquisition(cfg, spec, opts);
    const std::string rule(acq::to_string(spec.rule));
    run::write_iterations((out / ("iterations_" + rule + ".csv")).string(), rec);
    run::write_terminal((out / ("terminal_" + rule + ".csv")).string(), rec);
    run::write_diagnostics((out / ("diagnostics_" + rule + ".csv")).string(), rec);
    if (cfg.finite_domain()) {
      run::write_sets((out / ("sets_" + rule + ".csv")).string(), rec,
                      run::build_problem(cfg, 0).points);
    }
    run::Summary summary = run::aggregate(rec);
    run::write_summary((out / ("summary_" + rule + ".csv")).string(), summary);
    for (const auto& s : rec.seeds) {
      ++total_seeds;
      if (s.ok) continue;
      ++failed_seeds;
      all_numerical = all_numerical && s.numerical;
      std::cerr << "warning: " << rule << " seed " << s.seed << " aborted at t=" << s.error_t << ": "
                << s.error << '\n';
    }
    if (!summary.rows.empty()) summaries.push_back(std::move(summary));
  }
  if (!summaries.empty()) {
    for (auto metric : run::kSummaryMetrics) {
      run::emit_plot(summaries, metric, (out / ("plot_" + std::string(metric) + ".svg")).string());
    }
  }
  std::cout << "wrote results for " << cfg.acquisitions.size() << " acquisition(s) x "
            << cfg.n_seeds << " seed(s) to " << out.string() << '\n';
  if (failed_seeds == total_seeds) {
    std::cerr << "error: every seed aborted\n";
    return all_numerical ? kExitNumerical : 1;
  }
  return 0;
}

int cmd_plot(const std::vector<std::string>& summaries, const std::vector<std::string>& labels,
             const std::string& metric, const std::string& out) {
  if (!labels.empty() && labels.size() != summaries.size()) {
    throw ConfigError("give one --label per --summary");
  }
  std::vector<run::Summary> loaded;
  for (std::size_t i = 0; i < summaries.size(); ++i) {
    run::Summary s = run::read_summary(summaries[i]);
    s.label = labels.empty() ? fs::path(summaries[i]).stem().string() : labels[i];
    loaded.push_back(std::move(s));
  }
  run::emit_plot(loaded, metric, out);
  return 0;
}

int cmd_bound_check(const std::string& config, int seeds, const std::string& out) {
  run::ExperimentConfig cfg = run::load_config(config);
  if (seeds > 0) cfg.n_seeds = seeds;
  cfg.validate();
  if (!(cfg.noise_variance > 0.0)) {
    throw ConfigError("bound-check needs noise_variance > 0");
  }
  const run::RunRecord rec = run::run_acquisition(cfg, cfg.acquisitions.front());
  const run::TheoryReport report = run::bound_check(rec, cfg);
  run::write_bound_report(out, report);
  std::cout << "bound check (" << report.seeds_used << " seeds, " << report.rows.size()
            << " iterations): " << report.verdict() << '\n';
  if (report.misspecified) {
    std::cout << "note: target is not a sample from the model prior; verdict is advisory\n";
  }
  return report.verdict() == "FAIL" ? 1 : 0;
}

int cmd_ingest(const std::string& csv, bool strict, const std::string& out) {
  const lab::IngestedDataset data = lab::ingest_lifetime_csv(csv, strict);
  run::ExperimentConfig cfg;
  cfg.blackbox.kind = "tabulated";
  const fs::path out_dir = fs::absolute(out).parent_path();
  cfg.blackbox.csv = fs::relative(fs::absolute(csv), out_dir).generic_string();
  cfg.blackbox.strict = strict;
  cfg.blackbox.observation_noise_variance = 0.0;
  cfg.domain.type = "tabulated";
  cfg.domain.allow_repeat = false;
  cfg.kernel = gp::KernelSpec::matern32(4.0, 25.0);
  cfg.noise_variance = 1e-6;
  cfg.theta = 0.0;
  acq::AcquisitionSpec lse;
  lse.rule = acq::Rule::lse;
  lse.lse_cardinality = static_cast<double>(data.coordinates.rows());
  cfg.acquisitions = {{acq::Rule::random}, {acq::Rule::us}, {acq::Rule::straddle}, lse,
                      {acq::Rule::mile}, {acq::Rule::rand_straddle}};
  cfg.iterations = 200;
  cfg.n_seeds = 1;
  cfg.validate();
  run::save_config(cfg, out);
  std::cout << "ingested " << data.coordinates.rows() << " points; wrote " << out << '\n';
  return 0;
}

int cmd_synth(const std::string& out, std::uint64_t seed) {
  std::ofstream f(out, std::ios::binary);
  if (!f) throw IoError("cannot open '" + out + "' for writing");
  f << lab::synthetic_lifetime_csv(seed);
  if (!f.flush()) throw IoError("write failed for '" + out + "'");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Level set estimation experiments with Gaussian processes"};
  app.require_subcommand(1);

  RunArgs run_args;
  auto* run = app.add_subcommand("run", "Run every acquisition in a config over its seeds");
  run->add_option("--config", run_args.config, "Experiment config (JSON)")->required();
  run->add_option("--seeds", run_args.seeds, "Override n_seeds");
  run->add_option("--iterations", run_args.iterations, "Override iterations");
  run->add_option("--out", run_args.out, "Output directory");
  run->add_flag("--wall-time", run_args.wall_time, "Record per-iteration wall time in wall_ms");

  std::vector<std::string> summaries;
  std::vector<std::string> labels;
  std::string metric = "r_t";
  std::string plot_out;
  auto* plot = app.add_subcommand("plot", "Plot summary CSVs as SVG");
  plot->add_option("--summary", summaries, "Summary CSV (repeatable)")->required();
  plot->add_option("--label", labels, "Legend label per summary (repeatable)");
  plot->add_option("--metric", metric, "r_t, fscore or max_loss");
  plot->add_option("--out", plot_out, "Output SVG")->required();

  std::string bc_config;
  std::string bc_out;
  int bc_seeds = 0;
  auto* bc = app.add_subcommand("bound-check", "Compare empirical losses with the regret bounds");
  bc->add_option("--config", bc_config, "Experiment config (JSON)")->required();
  bc->add_option("--seeds", bc_seeds, "Override n_seeds");
  bc->add_option("--out", bc_out, "Report CSV")->required();

  std::string ing_csv;
  std::string ing_out;
  bool strict = false;
  auto* ingest = app.add_subcommand("ingest", "Turn a lifetime CSV into an experiment config");
  ingest->add_option("--csv", ing_csv, "CSV with header x1,x2,lifetime")->required();
  ingest->add_flag("--strict", strict, "Require the full 89 x 74 lattice");
  ingest->add_option("--out", ing_out, "Config JSON to write")->required();

  std::string synth_out;
  std::uint64_t synth_seed = 0;
  auto* synth = app.add_subcommand("synth-lifetime", "Write a synthetic lifetime map CSV");
  synth->add_option("--out", synth_out, "Output CSV")->required();
  synth->add_option("--seed", synth_seed, "Generator seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(run_args);
    if (*plot) return cmd_plot(summaries, labels, metric, plot_out);
    if (*bc) return cmd_bound_check(bc_config, bc_seeds, bc_out);
    if (*ingest) return cmd_ingest(ing_csv, strict, ing_out);
    if (*synth) return cmd_synth(synth_out, synth_seed);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
