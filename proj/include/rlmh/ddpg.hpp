#pragma once

#include <cstddef>
#include <vector>

#include "rlmh/kernels.hpp"
#include "rlmh/neuralnet.hpp"
#include "rlmh/targets.hpp"

namespace rlmh {

/// Raw network output u -> eps = eps_min + (eps_max - eps_min) sigmoid(u).
struct ActionTransform {
  double eps_min = kEpsMin;
  double eps_max = kEpsMax;

  double apply(double u) const;
  double derivative(double u) const;
  double inverse(double eps) const;
};

/// Ring store of transitions, sampled uniformly without replacement
/// within a minibatch.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity = 25000);

  void push(const Transition& t);
  std::size_t size() const { return store_.size(); }
  std::size_t capacity() const { return capacity_; }
  const Transition& at(std::size_t i) const { return store_[i]; }

  std::vector<std::size_t> sample_indices(std::size_t n, RngStream& rng) const;

 private:
  std::size_t capacity_;
  std::size_t cursor_ = 0;
  std::vector<Transition> store_;
  mutable std::vector<std::size_t> scratch_;
};

enum class RewardCentring { TdResidual, RawReward };

struct DdpgConfig {
  double lr_actor = 1e-6;
  double lr_critic = 1e-2;
  double tau = 0.001;
  double gamma = 0.99;
  double eta = 1e-3;
  int batch = 48;
  double clip_norm = 10.0;
  RewardCentring centring = RewardCentring::TdResidual;
  ActionTransform transform;
};

/// Actor eps_theta: R^d -> R (pre-transform); critic Q: R^{2d+2} -> R.
struct DdpgState {
  MlpParams actor;
  MlpParams critic;
  MlpParams actor_target;
  MlpParams critic_target;
  double r_bar = 0.0;
  double noise_sd = 0.0;
  DdpgConfig cfg;
};

Layout actor_layout(int dim);
Layout critic_layout(int dim);
DdpgState make_ddpg(int dim, const DdpgConfig& cfg, RngStream& rng);

/// eps_dagger = clamp(poly(eps0)) with
/// eps0 = lengthscale / (sqrt(lambda_max(Sigma^{-1})) d^{1/3}) and
/// poly(e) = 29 e^3 - 26 e^2 + 3 e + 1.3.
double initial_step_size(const ReferenceSet& reference, int d);

struct PretrainConfig {
  int epochs = 100;
  int batch = 16;
  double lr = 0.01;
};

struct PretrainReport {
  bool converged = false;  // mean |eps - eps_dagger| < 5% of eps_dagger
  double mean_abs_dev = 0.0;
};

/// SGD on (1/m) sum (eps_theta(y_j) - eps_dagger)^2 in post-transform space.
PretrainReport pretrain_actor(MlpParams& actor, const ReferenceSet& reference,
                              double eps_dagger, const PretrainConfig& cfg,
                              const ActionTransform& transform, RngStream& rng);

/// transform(actor(x) + N(0, noise_sd^2)); noise pre-transform.
double select_action(const MlpParams& actor, const Vector& x, double noise_sd,
                     const ActionTransform& transform, RngStream& rng);

struct UpdateMetrics {
  double critic_loss = 0.0;
  double mean_q = 0.0;
  double r_bar = 0.0;
};

/// One full update pass in printed order: reward centring, TD targets from
/// the target networks, critic SGD descent, actor SGD ascent along the
/// deterministic policy gradient, average-reward update, soft target updates.
UpdateMetrics ddpg_update(DdpgState& st, const ReplayBuffer& buffer, RngStream& rng);

MlpParams soft_update(const MlpParams& target, const MlpParams& online, double tau);

/// Deterministic policy evaluation eps(x) = transform(actor(x)).
StepSizePolicy neural_policy(const MlpParams& actor, const ActionTransform& transform);

}  // namespace rlmh
