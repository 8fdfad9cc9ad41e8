#include <iostream>

#include "CLI11.hpp"
#include "shg/experiment.hpp"

int main(int argc, char** argv) {
  CLI::App app{"second-harmonic lab: forward solves, admittance data, CGO probes, reconstruction"};
  app.require_subcommand(1);
  std::string config_path, out_dir;
  unsigned long long seed = 0;
  int jobs = 1;
  for (const auto& name : shg::subcommands()) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "experiment YAML")->required();
    sub->add_option("--out", out_dir, "output directory (overrides the config)");
    sub->add_option("--seed", seed, "random seed (overrides the config)");
    sub->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
  }
  CLI11_PARSE(app, argc, argv);
  CLI::App* sub = app.get_subcommands().front();

  try {
    shg::ExperimentConfig cfg = shg::load_config(config_path);
    shg::RunOptions opts;
    if (!out_dir.empty()) opts.out_dir = out_dir;
    if (sub->count("--seed")) opts.seed = seed;
    opts.jobs = jobs;
    return shg::run_experiment(cfg, sub->get_name(), opts);
  } catch (const shg::ConfigError& e) {
    std::cerr << "shglab: invalid config: " << e.what() << "\n";
    return 2;
  } catch (const shg::Error& e) {
    std::cerr << "shglab: [" << shg::error_module(e.code()) << "] " << e.what() << "\n";
    return e.code() == shg::Errc::IoError ? 2 : 1;
  }
}
