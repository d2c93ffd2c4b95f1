#include <CLI11.hpp>
#include <iostream>
#include <optional>

#include "commands.hpp"

namespace {

int exit_code(wgt::ErrorCode c) {
  switch (c) {
    case wgt::ErrorCode::Disconnected:
    case wgt::ErrorCode::DetailedBalanceViolation:
      return 3;
    case wgt::ErrorCode::NonFinite:
    case wgt::ErrorCode::EigensolverFailure:
    case wgt::ErrorCode::StepTooLarge:
    case wgt::ErrorCode::SingularSystem:
      return 4;
    default:
      return 2;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Weighted mixing matrices, spectral diagnostics and gradient-tracking simulation"};
  app.require_subcommand(1);
  std::string config_path, out_dir;
  std::optional<std::uint64_t> seed;
  int jobs = 1;
  app.add_option("--config", config_path, "JSON configuration file (built-in paper preset if omitted)");
  app.add_option("--out", out_dir, "output directory (default: ./out)");
  app.add_option("--seed", seed, "first experiment seed; also reseeds random and custom topologies");
  app.add_option("--jobs", jobs, "worker threads for multi-seed runs")->check(CLI::PositiveNumber);

  auto* gaps = app.add_subcommand("gaps", "spectral-gap table for every configured topology");
  auto* build = app.add_subcommand("build-graph", "write edge lists and JSON sidecars");
  auto* simulate = app.add_subcommand("simulate", "multi-seed gradient-tracking runs");
  auto* compare = app.add_subcommand("compare", "head-to-head verdict for one topology");
  auto* bounds = app.add_subcommand("bounds", "closed-form rate bounds");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    auto cfg = cli::load_config(config_path.empty() ? std::nullopt
                                                    : std::optional<std::filesystem::path>(config_path));
    cfg.jobs = jobs;
    if (!out_dir.empty()) {
      cfg.out = out_dir;
    } else if (cfg.tree.contains("out")) {
      cfg.out = cfg.tree.at("out").get<std::string>();
    }
    if (seed) {
      const auto count = cfg.experiment.seeds.size();
      for (std::size_t k = 0; k < count; ++k) cfg.experiment.seeds[k] = *seed + k;
      for (auto& t : cfg.topologies) t.spec.seed = *seed;
      cfg.tree["experiment"]["seeds"] = cfg.experiment.seeds;
    }

    if (*gaps) return cli::cmd_gaps(cfg);
    if (*build) return cli::cmd_build_graph(cfg);
    if (*simulate) return cli::cmd_simulate(cfg);
    if (*compare) return cli::cmd_compare(cfg);
    if (*bounds) return cli::cmd_bounds(cfg);
  } catch (const wgt::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
