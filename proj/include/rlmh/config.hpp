#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rlmh/classic_adapt.hpp"
#include "rlmh/ddpg.hpp"
#include "rlmh/rewards.hpp"

namespace rlmh {

enum class KernelChoice { Rmala, Barker, Mala };
enum class G0Source { ReferenceCovariance, Identity, File };

struct RunConfig {
  // target
  std::string target = "gaussian2d";
  int target_dim = 0;  // 0 = target default
  double laplace_scale = 1.0;
  double banana_sigma1 = 2.0;
  double banana_b = 0.5;
  double mixture_separation = 2.0;
  double mixture_sd = 1.0;
  double mixture_weight = 0.5;
  std::string glm_data;
  std::string glm_family = "logistic";
  double glm_prior_scale = 1.0;

  // sampler
  KernelChoice kernel = KernelChoice::Rmala;
  PolicyKind policy = PolicyKind::Constant;
  TunerKind tuner = TunerKind::None;
  RewardKind reward = RewardKind::Cdlb;
  double step_size = 0.1;  // constant-policy epsilon

  // protocol
  long long total_iterations = 30000;
  long long freeze_window = 5000;
  int episode_length = 500;
  int passes_per_episode = 50;
  std::uint64_t seed = 1;
  int replicates = 1;

  // preconditioner
  G0Source g0_source = G0Source::ReferenceCovariance;
  std::string g0_file;

  // reference
  int reference_size = 2000;
  std::uint64_t reference_seed = 1234;

  // ddpg
  double lr_actor = 1e-6;
  double lr_critic = 1e-2;
  double tau = 0.001;
  double gamma = 0.99;
  double eta = 1e-3;
  int batch = 48;
  int buffer_capacity = 25000;
  double clip_norm = 10.0;
  double noise_sd = -1.0;  // < 0: use the initialisation step size
  std::string reward_centring = "td-residual";

  // pretraining
  int pretrain_epochs = 100;
  int pretrain_batch = 16;
  double pretrain_lr = 0.01;

  // classic tuner
  int tuner_window = 0;  // 0 = budget rule (5000, or total/96 for short runs)
  bool aar_two_window = false;

  // output
  std::string out_dir = "out";
  bool write_trace = true;
};

/// Parses, applies defaults, validates. Unknown keys and invalid values
/// are errors naming the offending key.
RunConfig load_config(const std::string& json_text);
RunConfig load_config_file(const std::string& path);
std::string serialize_config(const RunConfig& cfg);

/// Applies "key=value" to the serialized form and re-validates.
RunConfig apply_override(const RunConfig& cfg, const std::string& key_value);

/// FNV-1a over the canonical serialized form.
std::uint64_t config_hash(const RunConfig& cfg);

}  // namespace rlmh
