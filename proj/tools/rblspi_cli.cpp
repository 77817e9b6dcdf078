// Command-line front end: run, chain, plot, validate.
// Exit codes: 0 success, 1 configuration error, 2 runtime error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "rblspi/rblspi.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kConfigFailure = 1;
constexpr int kRuntimeFailure = 2;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian least-squares policy iteration experiments"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::size_t workers = 0;
  std::optional<std::uint64_t> seed;

  auto* run = app.add_subcommand("run", "Run a full experiment from a JSON config");
  run->add_option("config", config_path, "Experiment config (JSON)")->required();
  run->add_option("--workers", workers, "Concurrent runs (default: config value)");
  run->add_option("--out", out_dir, "Output directory (default: config output_dir)");
  run->add_option("--seed", seed, "Override base_seed");

  auto* validate_cmd = app.add_subcommand("validate", "Check a config against the schema");
  validate_cmd->add_option("config", config_path, "Experiment config (JSON)")->required();

  rblspi::ChainReportConfig chain_cfg;
  auto* chain = app.add_subcommand("chain", "Chain-walk LSPI/BLSPI policy-iteration report");
  chain->add_option("--seed", seed, "Sampling seed");
  chain->add_option("--samples", chain_cfg.samples, "Number of uniformly collected transitions");
  chain->add_option("--alpha", chain_cfg.alpha, "BLSPI prior precision");
  chain->add_option("--beta", chain_cfg.beta, "BLSPI noise precision");
  chain->add_option("--out", out_dir, "Also write chain_report.csv here");
  chain->add_option("--workers", workers, "Ignored; accepted for uniformity");

  std::string aggregate_path, svg_path, metric = "steps", title;
  std::size_t window = 100;
  auto* plot_cmd = app.add_subcommand("plot", "Render an aggregate CSV as SVG");
  plot_cmd->add_option("aggregate", aggregate_path, "aggregate.csv")->required();
  plot_cmd->add_option("svg", svg_path, "Output SVG path")->required();
  plot_cmd->add_option("--metric", metric, "Y-axis label");
  plot_cmd->add_option("--window", window, "Episodes per window");
  plot_cmd->add_option("--title", title, "Plot title");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigFailure;
  }

  try {
    if (*validate_cmd) {
      const auto cfg = rblspi::load_config(config_path);
      std::cout << "ok: " << cfg.name << " (" << rblspi::sweep_points(cfg).size() << " sweep points x " << cfg.runs
                << " runs)\n";
      return kOk;
    }
    if (*run) {
      auto cfg = rblspi::load_config(config_path);
      if (seed) cfg.base_seed = *seed;
      if (!out_dir.empty()) cfg.output_dir = out_dir;
      const auto result = rblspi::run_experiment(cfg, workers);
      rblspi::write_outputs(cfg, result, cfg.output_dir);
      for (const auto& [id, series] : result.aggregates) {
        std::cout << "sweep " << id;
        if (!series.windows.empty()) {
          const auto& last = series.windows.back();
          std::cout << ": final window mean " << last.mean << " ± " << last.ci95 << " " << series.metric;
        }
        std::cout << '\n';
      }
      if (result.failed_updates > 0)
        std::cerr << "warning: " << result.failed_updates << " posterior/LSTD updates failed and were skipped\n";
      std::cout << "wrote " << cfg.output_dir << '\n';
      return kOk;
    }
    if (*chain) {
      if (seed) chain_cfg.seed = *seed;
      const auto report = rblspi::chain_walk_report(chain_cfg);
      rblspi::print_chain_report(std::cout, report);
      if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        rblspi::write_text(std::filesystem::path(out_dir) / "chain_report.csv", rblspi::chain_report_csv(report));
      }
      return kOk;
    }
    if (*plot_cmd) {
      std::ifstream in(aggregate_path);
      if (!in) throw rblspi::IoError("cannot open '" + aggregate_path + "'");
      const auto rows = rblspi::read_aggregate_csv(in);
      std::vector<rblspi::PlotSeries> series;
      for (auto& [id, s] : rblspi::series_from_rows(rows, metric, window))
        series.push_back({"sweep " + std::to_string(id), s});
      rblspi::plot(series, svg_path, title);
      return kOk;
    }
  } catch (const rblspi::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntimeFailure;
  }
  return kOk;
}
