#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rlmh/config.hpp"
#include "rlmh/evaluation.hpp"

namespace rlmh {

struct EvalCounters {
  long long logp = 0;
  long long grad = 0;
};

/// Wraps a target so every density/gradient evaluation is counted.
TargetDistribution with_counters(const TargetDistribution& t,
                                 std::shared_ptr<EvalCounters> counters);

TargetDistribution build_target(const RunConfig& cfg);

/// Deterministic reference for the configured target (i.i.d. where exact
/// samplers exist, otherwise a seeded AAR-pre-tuned thinned chain).
ReferenceSet build_reference(const RunConfig& cfg, const TargetDistribution& target);

Preconditioner build_preconditioner(const RunConfig& cfg, const ReferenceSet& ref,
                                    int dim);

struct ReplicateResult {
  int replicate = 0;
  RunSummary summary;
  bool catastrophic = false;
  std::string failure_reason;
  long long n_logp_evals = 0;
  long long n_grad_evals = 0;
  double eps_dagger = 0.0;   // ddpg runs
  double eps_final = 0.0;    // constant / tuned runs: last epsilon
  std::uint64_t param_hash_freeze = 0;
  std::uint64_t param_hash_final = 0;
  std::string trace_path;
  std::string actor_path;    // final actor checkpoint (ddpg runs)
  PretrainReport pretrain;
};

struct RunResult {
  std::string out_dir;
  std::vector<ReplicateResult> replicates;
  bool any_catastrophic() const;
};

RunResult run_experiment(const RunConfig& cfg);

struct SweepRow {
  double eps = 0.0;
  double mmd_p25 = 0.0;
  double mmd_p50 = 0.0;
  double mmd_p75 = 0.0;
  int failed = 0;  // replicates that hit the detector at this grid point
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::string table_path;
};

/// One constant-epsilon run per grid point; per-row MMD percentiles
/// (nearest-rank order statistics) across replicates.
SweepResult sweep(const RunConfig& config_template, const std::vector<double>& grid);

/// Percentile as nearest-rank order statistic, p in [0, 100].
double percentile_nearest_rank(std::vector<double> values, double p);

struct GridBounds {
  double x1_min = -4.0;
  double x1_max = 4.0;
  double x2_min = -4.0;
  double x2_max = 4.0;
};

/// eps_theta on a regular (resolution+1)^2 grid, CSV rows (x1, x2, eps).
void policy_grid_export(const MlpParams& actor, const ActionTransform& transform,
                        const GridBounds& bounds, int resolution,
                        const std::string& out_path);
void policy_grid_export_checkpoint(const std::string& actor_checkpoint,
                                   const GridBounds& bounds, int resolution,
                                   const std::string& out_path);

std::uint64_t fnv1a_hash(const unsigned char* data, std::size_t n);
std::uint64_t params_hash(const MlpParams& p);

}  // namespace rlmh
