// Benchmark CLI. Talks to the sampler exclusively through the C interface.

#include <cstdint>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rlmh/c_api.h"

namespace {

struct CommonFlags {
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int replicates = 0;
  std::vector<std::string> overrides;
};

void add_common_flags(CLI::App* cmd, CommonFlags* flags) {
  cmd->add_option("--config", flags->config_path, "Run configuration document");
  cmd->add_option("--out", flags->out_dir, "Output directory");
  cmd->add_option("--seed", flags->seed, "Base seed for replicate streams")
      ->each([flags](const std::string&) { flags->seed_set = true; });
  cmd->add_option("--replicates", flags->replicates, "Number of replicates")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--override", flags->overrides,
                  "key=value applied after the config document (repeatable)");
}

// Config document first, then --override in order, then dedicated flags.
rlmh_config* build_config(const CommonFlags& flags) {
  rlmh_config* cfg = flags.config_path.empty()
                         ? rlmh_config_default()
                         : rlmh_config_from_file(flags.config_path.c_str());
  if (cfg == nullptr) return nullptr;
  for (const auto& kv : flags.overrides) {
    if (rlmh_config_override(cfg, kv.c_str()) != RLMH_OK) {
      rlmh_config_free(cfg);
      return nullptr;
    }
  }
  if (flags.seed_set) rlmh_config_set_seed(cfg, flags.seed);
  if (!flags.out_dir.empty()) rlmh_config_set_out_dir(cfg, flags.out_dir.c_str());
  if (flags.replicates > 0 &&
      rlmh_config_set_replicates(cfg, flags.replicates) != RLMH_OK) {
    rlmh_config_free(cfg);
    return nullptr;
  }
  return cfg;
}

int fail(rlmh_status status) {
  std::fprintf(stderr, "error: %s\n", rlmh_last_error());
  return static_cast<int>(status);
}

int run_command(const CommonFlags& flags) {
  rlmh_config* cfg = build_config(flags);
  if (cfg == nullptr) return fail(RLMH_ERR_CONFIG);
  rlmh_result* result = nullptr;
  const rlmh_status status = rlmh_run(cfg, &result);
  rlmh_config_free(cfg);
  if (result == nullptr) return fail(status);

  std::printf("out: %s\n", rlmh_result_out_dir(result));
  const int n = rlmh_result_replicates(result);
  for (int i = 0; i < n; ++i) {
    if (rlmh_result_catastrophic(result, i) == 1) {
      std::printf("replicate %d: catastrophic (%s)\n", i,
                  rlmh_result_failure_reason(result, i));
    } else {
      std::printf("replicate %d: aar=%.4f esjd=%.6g mmd=%.6g eps_final=%.6g\n", i,
                  rlmh_result_aar(result, i), rlmh_result_mean_esjd(result, i),
                  rlmh_result_mmd(result, i), rlmh_result_eps_final(result, i));
    }
  }
  rlmh_result_free(result);
  if (status == RLMH_ERR_CATASTROPHIC) {
    std::fprintf(stderr, "error: %s\n",
                 "catastrophic failure detected in at least one replicate");
  }
  return static_cast<int>(status);
}

bool parse_grid(const std::string& text, std::vector<double>* grid) {
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    try {
      std::size_t used = 0;
      const double v = std::stod(cell, &used);
      if (used != cell.size()) return false;
      grid->push_back(v);
    } catch (const std::exception&) {
      return false;
    }
  }
  return !grid->empty();
}

int sweep_command(const CommonFlags& flags, const std::string& grid_text) {
  std::vector<double> grid;
  if (!parse_grid(grid_text, &grid)) {
    std::fprintf(stderr, "error: invalid value for '--grid': %s\n", grid_text.c_str());
    return static_cast<int>(RLMH_ERR_CONFIG);
  }
  rlmh_config* cfg = build_config(flags);
  if (cfg == nullptr) return fail(RLMH_ERR_CONFIG);
  const rlmh_status status = rlmh_sweep(cfg, grid.data(), grid.size());
  if (status == RLMH_OK) {
    std::printf("sweep finished over %zu step sizes\n", grid.size());
  }
  rlmh_config_free(cfg);
  return status == RLMH_OK ? 0 : fail(status);
}

int export_command(const std::string& actor, const std::string& out, double x1_min,
                   double x1_max, double x2_min, double x2_max, int resolution) {
  const rlmh_status status =
      rlmh_export_policy(actor.c_str(), x1_min, x1_max, x2_min, x2_max, resolution,
                         out.c_str());
  if (status != RLMH_OK) return fail(status);
  std::printf("policy grid written to %s\n", out.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"RLMH benchmark driver"};
  app.require_subcommand(1);

  CommonFlags run_flags;
  CLI::App* run = app.add_subcommand("run", "Execute one configured experiment");
  add_common_flags(run, &run_flags);

  CommonFlags sweep_flags;
  std::string grid_text = "0.05,0.1,0.2,0.5,1.0";
  CLI::App* sweep = app.add_subcommand("sweep", "Constant step-size grid");
  add_common_flags(sweep, &sweep_flags);
  sweep->add_option("--grid", grid_text, "Comma-separated step sizes");

  std::string actor_path, export_out = "policy_grid.csv";
  double x1_min = -4.0, x1_max = 4.0, x2_min = -4.0, x2_max = 4.0;
  int resolution = 40;
  CLI::App* exp = app.add_subcommand("export-policy", "Evaluate an actor on a grid");
  exp->add_option("--actor", actor_path, "Actor checkpoint file")->required();
  exp->add_option("--out", export_out, "Destination file");
  exp->add_option("--resolution", resolution, "Grid resolution r, (r+1)^2 points")
      ->check(CLI::PositiveNumber);
  exp->add_option("--x1-min", x1_min, "Grid lower bound, first coordinate");
  exp->add_option("--x1-max", x1_max, "Grid upper bound, first coordinate");
  exp->add_option("--x2-min", x2_min, "Grid lower bound, second coordinate");
  exp->add_option("--x2-max", x2_max, "Grid upper bound, second coordinate");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return static_cast<int>(RLMH_ERR_CONFIG);
  }

  if (run->parsed()) return run_command(run_flags);
  if (sweep->parsed()) return sweep_command(sweep_flags, grid_text);
  return export_command(actor_path, export_out, x1_min, x1_max, x2_min, x2_max,
                        resolution);
}
