// vts: run variational Thompson sampling experiments and plot their regret curves.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "vts/config.hpp"
#include "vts/experiment.hpp"
#include "vts/report.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;

std::size_t default_workers() {
  if (const char* env = std::getenv("VTS_WORKERS")) {
    try {
      const long v = std::stol(env);
      if (v >= 1) return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
    }
    std::cerr << "vts: ignoring invalid VTS_WORKERS=" << env << "\n";
  }
  return 1;
}

int cmd_run(const std::string& config_path, const std::optional<std::string>& profile,
            const std::optional<std::uint64_t>& seed, std::size_t workers,
            const std::optional<std::string>& out_dir) {
  vts::ExperimentConfig config;
  try {
    config = vts::load_config(config_path);
    if (profile) vts::apply_profile(config, *profile);
    if (seed) config.master_seed = *seed;
    if (out_dir) config.output_dir = *out_dir;
    config.validate();
  } catch (const vts::ConfigError& e) {
    std::cerr << "vts: " << e.what() << "\n";
    return kExitValidation;
  }

  try {
    vts::RunTimestamps times;
    times.started = vts::iso8601_now();
    const auto result = vts::run_experiment(config, {vts::Execution::Parallel, workers});
    times.finished = vts::iso8601_now();

    const auto manifest = vts::build_manifest(config, result, times, workers);
    const auto files = vts::emit_csv(result, manifest, config.output_dir);
    const auto svg = std::filesystem::path(config.output_dir) / "regret.svg";
    vts::emit_plot(files.regret, svg);

    for (const auto& sweep : result.sweeps) {
      const auto& agg = sweep.aggregate;
      std::cout << "K=" << sweep.components << "  R(T)=" << agg.regret_mean.back() << " +/- "
                << agg.regret_std.back() << "  MSE=";
      for (std::size_t a = 0; a < agg.mse_mean.size(); ++a) {
        std::cout << (a ? "," : "") << agg.mse_mean[a];
      }
      std::cout << "  failed=" << sweep.failures.size() << "\n";
    }
    std::cout << "wrote " << files.regret.string() << ", " << files.mse.string() << ", "
              << files.manifest.string() << ", " << svg.string() << "\n";
  } catch (const std::exception& e) {
    std::cerr << "vts: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitOk;
}

int cmd_plot(const std::string& in, const std::string& out) {
  try {
    vts::emit_plot(in, out);
  } catch (const vts::ParseError& e) {
    std::cerr << "vts: " << in << ": " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "vts: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Variational Thompson sampling for contextual Gaussian-mixture bandits"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run an experiment described by a JSON config");
  std::string config_path;
  std::optional<std::string> profile;
  std::optional<std::uint64_t> seed;
  std::size_t workers = default_workers();
  std::optional<std::string> out_dir;
  run->add_option("--config", config_path, "Experiment config (JSON)")->required();
  run->add_option("--profile", profile, "Scale profile: desk (T=500, N=500) or paper (N=5000)")
      ->check(CLI::IsMember({"desk", "paper"}));
  run->add_option("--seed", seed, "Master seed (overrides the config)");
  run->add_option("--workers", workers, "Worker threads (default: $VTS_WORKERS or 1)")
      ->check(CLI::PositiveNumber);
  run->add_option("--out", out_dir, "Output directory (overrides the config)");

  auto* plot = app.add_subcommand("plot", "Render regret.csv as an SVG");
  std::string plot_in, plot_out;
  plot->add_option("--in", plot_in, "regret.csv")->required();
  plot->add_option("--out", plot_out, "Output SVG")->required();

  auto* scenarios = app.add_subcommand("scenarios", "Print the built-in Scenario A/B models");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  if (*run) return cmd_run(config_path, profile, seed, workers, out_dir);
  if (*plot) return cmd_plot(plot_in, plot_out);
  if (*scenarios) {
    std::cout << vts::builtin_scenarios_json().dump(2) << "\n";
    return kExitOk;
  }
  return kExitValidation;
}
