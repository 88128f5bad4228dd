#include <CLI11.hpp>
#include <cstdint>
#include <string>

#include "experiments.hpp"
#include "svg.hpp"

int main(int argc, char** argv) {
  CLI::App app{"driftlab: drift-based generative modeling experiment runner"};
  app.require_subcommand(1);

  driftlab::cli::RunOptions run_opt;
  std::uint64_t seed = 0;
  auto* run = app.add_subcommand("run", "Run an experiment from a TOML/JSON config");
  run->add_option("config", run_opt.config_path, "config file")->required();
  run->add_option("--out", run_opt.out_dir, "output directory (overrides config)");
  auto* seed_opt = run->add_option("--seed", seed, "master seed (overrides config)");

  std::string val_path;
  auto* validate = app.add_subcommand("validate", "Parse and validate a config");
  validate->add_option("config", val_path, "config file")->required();

  std::string csv_path, plot_kind = "line", plot_out;
  bool log_y = false;
  int value_col = 2;
  auto* plot = app.add_subcommand("plot", "Render a run CSV to a static SVG");
  plot->add_option("csv", csv_path, "input CSV")->required();
  plot->add_option("--kind", plot_kind, "line | scatter | heatmap")->required();
  plot->add_option("--out", plot_out, "output SVG path");
  plot->add_flag("--logy", log_y, "log10 y axis (line plots)");
  plot->add_option("--value-col", value_col, "heatmap value column (default 2)");

  CLI11_PARSE(app, argc, argv);

  if (run->parsed()) {
    run_opt.seed_override = seed_opt->count() > 0;
    run_opt.seed = seed;
    return driftlab::cli::run_experiment(run_opt);
  }
  if (validate->parsed()) return driftlab::cli::validate_config(val_path);
  if (plot->parsed()) {
    if (plot_out.empty()) plot_out = csv_path + ".svg";
    return driftlab::cli::emit_svg(csv_path, plot_out, plot_kind, log_y, value_col);
  }
  return 0;
}
