#include "rlmh/ddpg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rlmh/evaluation.hpp"

namespace rlmh {

double ActionTransform::apply(double u) const {
  double s;
  if (u >= 0.0) {
    s = 1.0 / (1.0 + std::exp(-u));
  } else {
    const double e = std::exp(u);
    s = e / (1.0 + e);
  }
  return eps_min + (eps_max - eps_min) * s;
}

double ActionTransform::derivative(double u) const {
  double s;
  if (u >= 0.0) {
    s = 1.0 / (1.0 + std::exp(-u));
  } else {
    const double e = std::exp(u);
    s = e / (1.0 + e);
  }
  return (eps_max - eps_min) * s * (1.0 - s);
}

double ActionTransform::inverse(double eps) const {
  if (!(eps > eps_min && eps < eps_max)) {
    throw Error(ErrorCode::OutOfRange, "inverse transform needs eps in (eps_min, eps_max)");
  }
  const double s = (eps - eps_min) / (eps_max - eps_min);
  return std::log(s / (1.0 - s));
}

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity_ == 0) {
    throw Error(ErrorCode::InvalidParameter, "replay capacity must be positive");
  }
  store_.reserve(capacity_);
}

void ReplayBuffer::push(const Transition& t) {
  if (store_.size() < capacity_) {
    store_.push_back(t);
  } else {
    store_[cursor_] = t;
  }
  cursor_ = (cursor_ + 1) % capacity_;
}

std::vector<std::size_t> ReplayBuffer::sample_indices(std::size_t n,
                                                      RngStream& rng) const {
  if (n > store_.size()) {
    throw Error(ErrorCode::BufferTooSmall, "minibatch larger than buffer contents");
  }
  scratch_.resize(store_.size());
  std::iota(scratch_.begin(), scratch_.end(), std::size_t{0});
  std::vector<std::size_t> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = i + rng.next_u64() % (scratch_.size() - i);
    std::swap(scratch_[i], scratch_[j]);
    out[i] = scratch_[i];
  }
  return out;
}

Layout actor_layout(int dim) { return {{dim, 8}, {8, 8}, {8, 1}}; }
Layout critic_layout(int dim) { return {{2 * dim + 2, 8}, {8, 8}, {8, 1}}; }

DdpgState make_ddpg(int dim, const DdpgConfig& cfg, RngStream& rng) {
  DdpgState st;
  st.cfg = cfg;
  st.actor = mlp_init(actor_layout(dim), rng);
  st.critic = mlp_init(critic_layout(dim), rng);
  st.actor_target = st.actor;
  st.critic_target = st.critic;
  return st;
}

double initial_step_size(const ReferenceSet& reference, int d) {
  if (!reference.covariance) {
    throw Error(ErrorCode::DegenerateCovariance, "reference has no covariance");
  }
  const double lengthscale = median_heuristic(reference.samples);

  // lambda_max(Sigma^{-1}) by power iteration on Cholesky solves.
  const CholFactor& factor = reference.covariance->chol();
  const int dim = reference.dim();
  Vector v = Vector::Ones(dim) / std::sqrt(static_cast<double>(dim));
  double lambda = 0.0;
  for (int it = 0; it < 10000; ++it) {
    Vector w = spd_solve(factor, v);
    const double next = v.dot(w);
    const double norm = w.norm();
    if (!(norm > 0.0) || !std::isfinite(norm)) {
      throw Error(ErrorCode::DegenerateCovariance, "power iteration diverged");
    }
    v = w / norm;
    if (it > 0 && std::abs(next - lambda) <= 1e-12 * std::abs(next)) {
      lambda = next;
      break;
    }
    lambda = next;
  }
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw Error(ErrorCode::DegenerateCovariance, "covariance spectrum degenerate");
  }

  const double eps0 = lengthscale / (std::sqrt(lambda) * std::cbrt(static_cast<double>(d)));
  const double raw = 29.0 * eps0 * eps0 * eps0 - 26.0 * eps0 * eps0 + 3.0 * eps0 + 1.3;
  return std::clamp(raw, kEpsMin, kEpsMax);
}

PretrainReport pretrain_actor(MlpParams& actor, const ReferenceSet& reference,
                              double eps_dagger, const PretrainConfig& cfg,
                              const ActionTransform& transform, RngStream& rng) {
  if (!(eps_dagger > transform.eps_min && eps_dagger < transform.eps_max)) {
    throw Error(ErrorCode::OutOfRange, "eps_dagger must lie inside the transform range");
  }
  const int m = reference.size();
  const int d = reference.dim();
  if (actor.input_width() != d) {
    throw Error(ErrorCode::DimensionMismatch, "actor input width differs from reference");
  }
  std::vector<int> order(m);
  std::iota(order.begin(), order.end(), 0);
  // Effectively unclipped SGD; clipping belongs to the online phase.
  const double no_clip = 1e12;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    for (int i = 0; i < m - 1; ++i) {
      const int j = i + static_cast<int>(rng.next_u64() % (m - i));
      std::swap(order[i], order[j]);
    }
    for (int start = 0; start < m; start += cfg.batch) {
      const int b = std::min(cfg.batch, m - start);
      Matrix x(d, b);
      for (int i = 0; i < b; ++i) {
        x.col(i) = reference.samples.row(order[start + i]).transpose();
      }
      auto [u, tape] = forward(actor, x);
      Matrix du(1, b);
      for (int i = 0; i < b; ++i) {
        const double eps = transform.apply(u(0, i));
        du(0, i) = 2.0 * (eps - eps_dagger) * transform.derivative(u(0, i)) / b;
      }
      auto [g, dx] = backward(actor, tape, du);
      actor = apply_update(actor, -g, cfg.lr, no_clip);
    }
  }

  double abs_dev = 0.0;
  for (int i = 0; i < m; ++i) {
    const double eps =
        transform.apply(forward_scalar(actor, reference.samples.row(i).transpose()));
    abs_dev += std::abs(eps - eps_dagger);
  }
  PretrainReport report;
  report.mean_abs_dev = abs_dev / m;
  report.converged = report.mean_abs_dev < 0.05 * eps_dagger;
  return report;
}

double select_action(const MlpParams& actor, const Vector& x, double noise_sd,
                     const ActionTransform& transform, RngStream& rng) {
  double u = forward_scalar(actor, x);
  if (noise_sd > 0.0) {
    u += noise_sd * rng.next_normal();
  }
  return transform.apply(u);
}

MlpParams soft_update(const MlpParams& target, const MlpParams& online, double tau) {
  if (target.layout != online.layout) {
    throw Error(ErrorCode::ShapeMismatch, "soft_update: layouts differ");
  }
  if (!(tau >= 0.0 && tau <= 1.0)) {
    throw Error(ErrorCode::OutOfRange, "soft_update: tau must lie in [0,1]");
  }
  MlpParams out = target;
  out.flat = (1.0 - tau) * target.flat + tau * online.flat;
  return out;
}

UpdateMetrics ddpg_update(DdpgState& st, const ReplayBuffer& buffer, RngStream& rng) {
  const int n = st.cfg.batch;
  if (buffer.size() < static_cast<std::size_t>(n)) {
    throw Error(ErrorCode::BufferTooSmall, "replay buffer smaller than minibatch");
  }
  const int d = st.actor.input_width();
  const auto& transform = st.cfg.transform;
  auto idx = buffer.sample_indices(static_cast<std::size_t>(n), rng);

  Matrix x(d, n), x_star(d, n), x_next(d, n);
  Matrix actions(2, n);
  Vector rewards(n);
  for (int i = 0; i < n; ++i) {
    const Transition& t = buffer.at(idx[i]);
    x.col(i) = t.x;
    x_star.col(i) = t.x_star;
    x_next.col(i) = t.x_next;
    actions(0, i) = t.eps_x;
    actions(1, i) = t.eps_x_star;
    rewards[i] = t.reward;
  }

  // TD targets from the target networks; s' = [x_next, x_star].
  Matrix u1p = forward(st.actor_target, x_next).first;
  Matrix u2p = forward(st.actor_target, x_star).first;
  Matrix s_next(2 * d + 2, n);
  s_next.topRows(d) = x_next;
  s_next.middleRows(d, d) = x_star;
  for (int i = 0; i < n; ++i) {
    s_next(2 * d, i) = transform.apply(u1p(0, i));
    s_next(2 * d + 1, i) = transform.apply(u2p(0, i));
  }
  Matrix q_next = forward(st.critic_target, s_next).first;
  Vector q_target(n);
  for (int i = 0; i < n; ++i) {
    q_target[i] = (rewards[i] - st.r_bar) + st.cfg.gamma * q_next(0, i);
  }

  // Critic: SGD descent on the mean squared TD error.
  Matrix s_a(2 * d + 2, n);
  s_a.topRows(d) = x;
  s_a.middleRows(d, d) = x_star;
  s_a.bottomRows(2) = actions;
  auto [q_sa, critic_tape] = forward(st.critic, s_a);
  Vector td_err(n);
  Matrix d_q(1, n);
  double critic_loss = 0.0;
  double mean_q = 0.0;
  for (int i = 0; i < n; ++i) {
    td_err[i] = q_target[i] - q_sa(0, i);
    critic_loss += td_err[i] * td_err[i] / n;
    mean_q += q_sa(0, i) / n;
    d_q(0, i) = -2.0 * td_err[i] / n;
  }
  Vector g_critic = backward(st.critic, critic_tape, d_q).first;
  st.critic = apply_update(st.critic, -g_critic, st.cfg.lr_critic, st.cfg.clip_norm);

  // Actor: ascent along the deterministic policy gradient, evaluated on the
  // freshly updated critic.
  auto [u1, actor_tape1] = forward(st.actor, x);
  auto [u2, actor_tape2] = forward(st.actor, x_star);
  Matrix s_pi(2 * d + 2, n);
  s_pi.topRows(d) = x;
  s_pi.middleRows(d, d) = x_star;
  for (int i = 0; i < n; ++i) {
    s_pi(2 * d, i) = transform.apply(u1(0, i));
    s_pi(2 * d + 1, i) = transform.apply(u2(0, i));
  }
  auto [q_pi, critic_tape_pi] = forward(st.critic, s_pi);
  (void)q_pi;
  Matrix d_obj = Matrix::Constant(1, n, 1.0 / n);
  Matrix d_input = backward(st.critic, critic_tape_pi, d_obj).second;
  Matrix du1(1, n), du2(1, n);
  for (int i = 0; i < n; ++i) {
    du1(0, i) = d_input(2 * d, i) * transform.derivative(u1(0, i));
    du2(0, i) = d_input(2 * d + 1, i) * transform.derivative(u2(0, i));
  }
  Vector g_actor = backward(st.actor, actor_tape1, du1).first +
                   backward(st.actor, actor_tape2, du2).first;
  st.actor = apply_update(st.actor, g_actor, st.cfg.lr_actor, st.cfg.clip_norm);

  // Average-reward update, after the critic step as printed.
  if (st.cfg.centring == RewardCentring::TdResidual) {
    Matrix q_new = forward(st.critic, s_a).first;
    double mean_residual = 0.0;
    for (int i = 0; i < n; ++i) {
      mean_residual += (q_target[i] - q_new(0, i)) / n;
    }
    st.r_bar += st.cfg.eta * st.cfg.lr_critic * mean_residual;
  } else {
    st.r_bar += st.cfg.eta * rewards.mean();
  }

  st.critic_target = soft_update(st.critic_target, st.critic, st.cfg.tau);
  st.actor_target = soft_update(st.actor_target, st.actor, st.cfg.tau);

  UpdateMetrics metrics;
  metrics.critic_loss = critic_loss;
  metrics.mean_q = mean_q;
  metrics.r_bar = st.r_bar;
  return metrics;
}

StepSizePolicy neural_policy(const MlpParams& actor, const ActionTransform& transform) {
  MlpParams snapshot = actor;
  return StepSizePolicy{PolicyKind::Neural, [snapshot, transform](const Vector& x) {
                          return transform.apply(forward_scalar(snapshot, x));
                        }};
}

}  // namespace rlmh
