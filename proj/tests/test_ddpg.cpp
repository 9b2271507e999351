#include "doctest.h"

#include <cmath>
#include <cstddef>
#include <vector>

#include "rlmh/ddpg.hpp"

using namespace rlmh;

namespace {

MlpParams init_mlp(const Layout& layout, std::uint64_t seed, std::uint64_t stream) {
  RngStream rng(seed, stream);
  return mlp_init(layout, rng);
}

Transition random_transition(int d, RngStream& rng) {
  Transition t;
  t.x = rng.normal_vector(d);
  t.x_star = rng.normal_vector(d);
  t.accepted = rng.next_uniform() < 0.5;
  t.x_next = t.accepted ? t.x_star : t.x;
  t.alpha = rng.next_uniform();
  t.eps_x = 0.05 + rng.next_uniform();
  t.eps_x_star = 0.05 + rng.next_uniform();
  t.reward = rng.next_normal();
  return t;
}

Vector stack_state(const Vector& x, const Vector& x_star, double a1, double a2) {
  const int d = static_cast<int>(x.size());
  Vector s(2 * d + 2);
  s.head(d) = x;
  s.segment(d, d) = x_star;
  s[2 * d] = a1;
  s[2 * d + 1] = a2;
  return s;
}

// TD target as printed: r centred by R-bar plus gamma times the target
// critic at s' = [x_next, x_star] with target-actor actions.
double q_target_of(const Transition& t, const DdpgState& pre) {
  const auto& tf = pre.cfg.transform;
  const double a1 = tf.apply(forward_scalar(pre.actor_target, t.x_next));
  const double a2 = tf.apply(forward_scalar(pre.actor_target, t.x_star));
  const Vector sp = stack_state(t.x_next, t.x_star, a1, a2);
  return (t.reward - pre.r_bar) + pre.cfg.gamma * forward_scalar(pre.critic_target, sp);
}

double critic_loss_of(const MlpParams& critic, const std::vector<Transition>& batch,
                      const std::vector<double>& q_targets) {
  double loss = 0.0;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const Transition& t = batch[i];
    const double q =
        forward_scalar(critic, stack_state(t.x, t.x_star, t.eps_x, t.eps_x_star));
    const double e = q_targets[i] - q;
    loss += e * e / static_cast<double>(batch.size());
  }
  return loss;
}

double actor_objective(const MlpParams& actor, const MlpParams& critic,
                       const ActionTransform& tf,
                       const std::vector<Transition>& batch) {
  double j = 0.0;
  for (const Transition& t : batch) {
    const double a1 = tf.apply(forward_scalar(actor, t.x));
    const double a2 = tf.apply(forward_scalar(actor, t.x_star));
    j += forward_scalar(critic, stack_state(t.x, t.x_star, a1, a2)) /
         static_cast<double>(batch.size());
  }
  return j;
}

template <typename F>
Vector fd_params_gradient(MlpParams p, F f, double h) {
  Vector g(p.flat.size());
  for (Eigen::Index k = 0; k < p.flat.size(); ++k) {
    const double save = p.flat[k];
    p.flat[k] = save + h;
    const double up = f(p);
    p.flat[k] = save - h;
    const double dn = f(p);
    p.flat[k] = save;
    g[k] = (up - dn) / (2.0 * h);
  }
  return g;
}

double max_rel_error(const Vector& got, const Vector& want) {
  double worst = 0.0;
  for (Eigen::Index k = 0; k < got.size(); ++k) {
    const double scale = std::max(1.0, std::abs(want[k]));
    worst = std::max(worst, std::abs(got[k] - want[k]) / scale);
  }
  return worst;
}

// Two-point 1D reference {-a, a}: median pairwise distance is a, so the
// lengthscale is a/2; covariance is 2a^2; hence eps0 = a^2 / sqrt(2) at d=1.
ReferenceSet two_point_reference(double eps0) {
  const double a = std::sqrt(eps0 * std::sqrt(2.0));
  Matrix samples(2, 1);
  samples << -a, a;
  return ReferenceSet::from_samples(samples);
}

}  // namespace

TEST_CASE("action transform midpoint and closed-form values") {
  ActionTransform tf;
  CHECK(tf.apply(0.0) == doctest::Approx(5.0000005).epsilon(1e-12));
  CHECK(tf.apply(0.0) == doctest::Approx(0.5 * (kEpsMin + kEpsMax)).epsilon(1e-12));
  ActionTransform narrow{1.0, 3.0};
  CHECK(narrow.apply(0.0) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("action transform is strictly increasing and stays inside the range") {
  ActionTransform tf;
  double prev = tf.apply(-30.0);
  for (double u = -29.5; u <= 30.0; u += 0.5) {
    const double cur = tf.apply(u);
    CHECK(cur > prev);
    CHECK(cur > tf.eps_min);
    CHECK(cur < tf.eps_max);
    prev = cur;
  }
}

TEST_CASE("action transform derivative matches finite differences") {
  ActionTransform tf;
  const double h = 1e-6;
  for (double u : {-3.0, -1.0, 0.0, 0.5, 2.0}) {
    const double fd = (tf.apply(u + h) - tf.apply(u - h)) / (2.0 * h);
    CHECK(tf.derivative(u) == doctest::Approx(fd).epsilon(1e-6));
  }
}

TEST_CASE("action transform inverse round-trips and rejects the boundary") {
  ActionTransform tf;
  for (double u : {-4.0, -0.3, 0.0, 1.7, 5.0}) {
    CHECK(tf.inverse(tf.apply(u)) == doctest::Approx(u).epsilon(1e-9));
  }
  for (double bad : {tf.eps_min, tf.eps_max, 0.0, 11.0}) {
    try {
      tf.inverse(bad);
      FAIL("expected OutOfRange");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::OutOfRange);
    }
  }
}

TEST_CASE("replay buffer is a ring that overwrites the oldest entry") {
  ReplayBuffer buf(3);
  RngStream rng(11, 0);
  for (int i = 0; i < 3; ++i) {
    Transition t = random_transition(2, rng);
    t.reward = i;
    buf.push(t);
  }
  CHECK(buf.size() == 3);
  Transition t3 = random_transition(2, rng);
  t3.reward = 3.0;
  buf.push(t3);
  CHECK(buf.size() == 3);
  CHECK(buf.at(0).reward == 3.0);
  CHECK(buf.at(1).reward == 1.0);
  CHECK(buf.at(2).reward == 2.0);
  Transition t4 = random_transition(2, rng);
  t4.reward = 4.0;
  buf.push(t4);
  CHECK(buf.at(1).reward == 4.0);
}

TEST_CASE("replay buffer rejects zero capacity and oversized minibatches") {
  try {
    ReplayBuffer bad(0);
    FAIL("expected InvalidParameter");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidParameter);
  }
  ReplayBuffer buf(8);
  RngStream rng(12, 0);
  buf.push(random_transition(1, rng));
  buf.push(random_transition(1, rng));
  try {
    buf.sample_indices(3, rng);
    FAIL("expected BufferTooSmall");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::BufferTooSmall);
  }
}

TEST_CASE("minibatch indices are distinct within a draw") {
  ReplayBuffer buf(64);
  RngStream rng(13, 0);
  for (int i = 0; i < 60; ++i) buf.push(random_transition(1, rng));
  for (int rep = 0; rep < 200; ++rep) {
    auto idx = buf.sample_indices(50, rng);
    std::vector<bool> seen(60, false);
    for (std::size_t j : idx) {
      CHECK(j < 60);
      CHECK(!seen[j]);
      seen[j] = true;
    }
  }
}

TEST_CASE("replay sampling is uniform across the buffer") {
  ReplayBuffer buf(128);
  RngStream rng(14, 0);
  for (int i = 0; i < 100; ++i) buf.push(random_transition(1, rng));
  const int draws = 100000;
  const std::size_t n = 10;
  std::vector<long> counts(100, 0);
  for (int rep = 0; rep < draws; ++rep) {
    for (std::size_t j : buf.sample_indices(n, rng)) counts[j]++;
  }
  // Each index enters a draw with probability n/100.
  const double p = static_cast<double>(n) / 100.0;
  const double mean = draws * p;
  const double se = std::sqrt(draws * p * (1.0 - p));
  for (long c : counts) {
    CHECK(std::abs(static_cast<double>(c) - mean) < 5.0 * se);
  }
}

TEST_CASE("network layouts and make_ddpg wiring") {
  CHECK(actor_layout(3) == Layout{{3, 8}, {8, 8}, {8, 1}});
  CHECK(critic_layout(3) == Layout{{8, 8}, {8, 8}, {8, 1}});
  RngStream rng(21, 0);
  DdpgState st = make_ddpg(2, DdpgConfig{}, rng);
  CHECK(st.actor.layout == actor_layout(2));
  CHECK(st.critic.layout == critic_layout(2));
  CHECK((st.actor_target.flat - st.actor.flat).norm() == 0.0);
  CHECK((st.critic_target.flat - st.critic.flat).norm() == 0.0);
  CHECK(st.r_bar == 0.0);
}

TEST_CASE("initial step size hits the worked polynomial values") {
  // eps0 = 1: 29 - 26 + 3 + 1.3 = 7.3
  CHECK(initial_step_size(two_point_reference(1.0), 1) ==
        doctest::Approx(7.3).epsilon(1e-12));
  // eps0 = 0.1: 0.029 - 0.26 + 0.3 + 1.3 = 1.369
  CHECK(initial_step_size(two_point_reference(0.1), 1) ==
        doctest::Approx(1.369).epsilon(1e-12));
  // eps0 = 0.5: raw polynomial -0.075, clamped to the floor.
  CHECK(initial_step_size(two_point_reference(0.5), 1) == kEpsMin);
}

TEST_CASE("initial step size divides by the cube root of the dimension") {
  // Same reference as the eps0 = 1 case, but d = 8 halves eps0 to 0.5,
  // which lands on the clamped branch.
  CHECK(initial_step_size(two_point_reference(1.0), 8) == kEpsMin);
}

TEST_CASE("initial step size requires a covariance") {
  ReferenceSet ref;
  ref.samples = Matrix::Zero(3, 1);
  ref.mean = Vector::Zero(1);
  try {
    initial_step_size(ref, 1);
    FAIL("expected DegenerateCovariance");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DegenerateCovariance);
  }
}

TEST_CASE("pretraining a constant-correct actor is an exact no-op") {
  ActionTransform tf;
  const double eps_dagger = 2.0;
  MlpParams actor = init_mlp(actor_layout(2), 31, 0);
  actor.flat.setZero();
  actor.flat[actor.flat.size() - 1] = tf.inverse(eps_dagger);

  RngStream ref_rng(31, 1);
  Matrix samples(32, 2);
  for (int i = 0; i < 32; ++i) samples.row(i) = ref_rng.normal_vector(2).transpose();
  ReferenceSet ref = ReferenceSet::from_samples(samples);

  const Vector before = actor.flat;
  RngStream rng(31, 2);
  PretrainReport report = pretrain_actor(actor, ref, eps_dagger, PretrainConfig{}, tf, rng);
  CHECK((actor.flat - before).norm() == 0.0);
  CHECK(report.converged);
  CHECK(report.mean_abs_dev < 1e-12);
}

TEST_CASE("pretraining with zero learning rate leaves parameters unchanged") {
  ActionTransform tf;
  MlpParams actor = init_mlp(actor_layout(2), 32, 0);
  RngStream ref_rng(32, 1);
  Matrix samples(40, 2);
  for (int i = 0; i < 40; ++i) samples.row(i) = ref_rng.normal_vector(2).transpose();
  ReferenceSet ref = ReferenceSet::from_samples(samples);

  PretrainConfig cfg;
  cfg.lr = 0.0;
  const Vector before = actor.flat;
  RngStream rng(32, 2);
  pretrain_actor(actor, ref, 2.0, cfg, tf, rng);
  CHECK((actor.flat - before).norm() == 0.0);
}

TEST_CASE("pretraining converges on a 2D gaussian reference") {
  ActionTransform tf;
  const double eps_dagger = 5.0;
  MlpParams actor = init_mlp(actor_layout(2), 33, 0);
  RngStream ref_rng(33, 1);
  Matrix samples(200, 2);
  for (int i = 0; i < 200; ++i) samples.row(i) = ref_rng.normal_vector(2).transpose();
  ReferenceSet ref = ReferenceSet::from_samples(samples);

  RngStream rng(33, 2);
  PretrainReport report = pretrain_actor(actor, ref, eps_dagger, PretrainConfig{}, tf, rng);
  CHECK(report.converged);
  CHECK(report.mean_abs_dev < 0.05 * eps_dagger);
  double worst = 0.0;
  for (int i = 0; i < ref.size(); ++i) {
    const double eps = tf.apply(forward_scalar(actor, ref.samples.row(i).transpose()));
    worst = std::max(worst, std::abs(eps - eps_dagger) / eps_dagger);
  }
  CHECK(worst < 0.05);
}

TEST_CASE("pretraining validates its inputs") {
  ActionTransform tf;
  MlpParams actor = init_mlp(actor_layout(2), 34, 0);
  Matrix samples = Matrix::Random(8, 2);
  ReferenceSet ref = ReferenceSet::from_samples(samples);
  RngStream rng(34, 1);
  try {
    pretrain_actor(actor, ref, tf.eps_max, PretrainConfig{}, tf, rng);
    FAIL("expected OutOfRange");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::OutOfRange);
  }
  MlpParams wrong = init_mlp(actor_layout(3), 34, 2);
  try {
    pretrain_actor(wrong, ref, 2.0, PretrainConfig{}, tf, rng);
    FAIL("expected DimensionMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DimensionMismatch);
  }
}

TEST_CASE("select_action without noise is the transformed forward pass") {
  ActionTransform tf;
  MlpParams actor = init_mlp(actor_layout(2), 41, 0);
  const Vector x = RngStream(41, 1).normal_vector(2);
  RngStream a(41, 2), b(41, 2);
  const double eps = select_action(actor, x, 0.0, tf, a);
  CHECK(eps == tf.apply(forward_scalar(actor, x)));
  // The stream is untouched when noise is off.
  CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("select_action consumes exactly one normal draw") {
  ActionTransform tf;
  MlpParams actor = init_mlp(actor_layout(2), 42, 0);
  const Vector x = RngStream(42, 1).normal_vector(2);
  RngStream a(42, 2), twin(42, 2);
  const double eps = select_action(actor, x, 0.7, tf, a);
  const double z = twin.next_normal();
  CHECK(eps == tf.apply(forward_scalar(actor, x) + 0.7 * z));
}

TEST_CASE("zero actor with zero noise lands on the range midpoint") {
  ActionTransform tf;
  MlpParams actor = init_mlp(actor_layout(2), 43, 0);
  actor.flat.setZero();
  RngStream rng(43, 1);
  CHECK(select_action(actor, Vector::Zero(2), 0.0, tf, rng) ==
        doctest::Approx(5.0000005).epsilon(1e-12));
}

TEST_CASE("noisy actions stay inside the transform range") {
  ActionTransform tf;
  MlpParams actor = init_mlp(actor_layout(2), 44, 0);
  RngStream rng(44, 1);
  for (int i = 0; i < 100000; ++i) {
    const Vector x = rng.normal_vector(2);
    const double eps = select_action(actor, x, 4.0, tf, rng);
    CHECK(eps > tf.eps_min);
    CHECK(eps < tf.eps_max);
  }
}

TEST_CASE("soft update convex combination cases") {
  Layout layout{{2, 3}, {3, 1}};
  RngStream rng(51, 0);
  MlpParams target = mlp_init(layout, rng);
  MlpParams online = mlp_init(layout, rng);

  MlpParams frozen = soft_update(target, online, 0.0);
  CHECK((frozen.flat - target.flat).norm() == 0.0);
  MlpParams copied = soft_update(target, online, 1.0);
  CHECK((copied.flat - online.flat).norm() == 0.0);

  MlpParams zeros = target;
  zeros.flat.setZero();
  MlpParams twos = target;
  twos.flat.setConstant(2.0);
  MlpParams half = soft_update(zeros, twos, 0.5);
  CHECK(half.flat.minCoeff() == 1.0);
  CHECK(half.flat.maxCoeff() == 1.0);
}

TEST_CASE("soft update validates layouts and tau") {
  RngStream rng(52, 0);
  MlpParams a = mlp_init(Layout{{2, 1}}, rng);
  MlpParams b = mlp_init(Layout{{3, 1}}, rng);
  try {
    soft_update(a, b, 0.5);
    FAIL("expected ShapeMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ShapeMismatch);
  }
  MlpParams c = mlp_init(Layout{{2, 1}}, rng);
  for (double tau : {-0.1, 1.1}) {
    try {
      soft_update(a, c, tau);
      FAIL("expected OutOfRange");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::OutOfRange);
    }
  }
}

TEST_CASE("repeated soft updates track a constant online network geometrically") {
  Layout layout{{2, 4}, {4, 1}};
  RngStream rng(53, 0);
  MlpParams online = mlp_init(layout, rng);
  MlpParams target = mlp_init(layout, rng);
  const double tau = 0.1;
  const double gap0 = (target.flat - online.flat).norm();
  double prev = gap0;
  for (int k = 1; k <= 25; ++k) {
    target = soft_update(target, online, tau);
    const double gap = (target.flat - online.flat).norm();
    CHECK(gap < prev);
    CHECK(gap == doctest::Approx(std::pow(1.0 - tau, k) * gap0).epsilon(1e-10));
    prev = gap;
  }
}

TEST_CASE("ddpg_update with all rates zero changes nothing") {
  DdpgConfig cfg;
  cfg.lr_actor = 0.0;
  cfg.lr_critic = 0.0;
  cfg.eta = 0.0;
  cfg.tau = 0.0;
  cfg.batch = 8;
  RngStream init(61, 0);
  DdpgState st = make_ddpg(2, cfg, init);

  ReplayBuffer buf(32);
  RngStream data(61, 1);
  for (int i = 0; i < 10; ++i) buf.push(random_transition(2, data));

  const Vector actor0 = st.actor.flat;
  const Vector critic0 = st.critic.flat;
  const Vector at0 = st.actor_target.flat;
  const Vector ct0 = st.critic_target.flat;
  RngStream rng(61, 2);
  UpdateMetrics metrics = ddpg_update(st, buf, rng);
  CHECK((st.actor.flat - actor0).norm() == 0.0);
  CHECK((st.critic.flat - critic0).norm() == 0.0);
  CHECK((st.actor_target.flat - at0).norm() == 0.0);
  CHECK((st.critic_target.flat - ct0).norm() == 0.0);
  CHECK(st.r_bar == 0.0);
  CHECK(metrics.r_bar == 0.0);
  CHECK(metrics.critic_loss >= 0.0);
  CHECK(std::isfinite(metrics.mean_q));
}

TEST_CASE("ddpg_update rejects a buffer smaller than the minibatch") {
  DdpgConfig cfg;
  cfg.batch = 48;
  RngStream init(62, 0);
  DdpgState st = make_ddpg(1, cfg, init);
  ReplayBuffer buf(64);
  RngStream data(62, 1);
  for (int i = 0; i < 5; ++i) buf.push(random_transition(1, data));
  RngStream rng(62, 2);
  try {
    ddpg_update(st, buf, rng);
    FAIL("expected BufferTooSmall");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::BufferTooSmall);
  }
}

TEST_CASE("critic step descends the finite-difference gradient of the TD loss") {
  // Single-transition batch with a one-layer linear critic.
  for (int inst = 0; inst < 10; ++inst) {
    const std::uint64_t seed = 100 + inst;
    DdpgConfig cfg;
    cfg.batch = 1;
    cfg.lr_critic = 0.5;
    cfg.lr_actor = 0.0;
    cfg.tau = 0.0;
    cfg.eta = 0.0;
    cfg.clip_norm = 1e12;

    DdpgState st;
    st.cfg = cfg;
    RngStream init(seed, 0);
    st.actor = mlp_init(actor_layout(1), init);
    st.actor_target = mlp_init(actor_layout(1), init);
    st.critic = mlp_init(Layout{{4, 1}}, init);
    st.critic_target = mlp_init(Layout{{4, 1}}, init);
    st.r_bar = 0.1 * RngStream(seed, 1).next_normal();

    RngStream data(seed, 2);
    Transition t = random_transition(1, data);
    ReplayBuffer buf(4);
    buf.push(t);

    const std::vector<double> q_targets{q_target_of(t, st)};
    const std::vector<Transition> batch{t};
    const Vector before = st.critic.flat;

    RngStream rng(seed, 3);
    ddpg_update(st, buf, rng);

    const Vector g_impl = (before - st.critic.flat) / cfg.lr_critic;
    MlpParams probe = st.critic;
    probe.flat = before;
    const Vector g_fd = fd_params_gradient(
        probe,
        [&](const MlpParams& p) { return critic_loss_of(p, batch, q_targets); },
        1e-6);
    CHECK(max_rel_error(g_impl, g_fd) < 1e-5);
  }
}

TEST_CASE("actor step ascends the finite-difference policy gradient on a frozen critic") {
  for (int inst = 0; inst < 6; ++inst) {
    const std::uint64_t seed = 200 + inst;
    const int d = 1 + inst % 2;
    DdpgConfig cfg;
    cfg.batch = 4;
    cfg.lr_critic = 0.0;
    cfg.lr_actor = 1.0;
    cfg.tau = 0.0;
    cfg.eta = 0.0;
    cfg.clip_norm = 1e12;

    DdpgState st;
    st.cfg = cfg;
    RngStream init(seed, 0);
    st.actor = mlp_init(Layout{{d, 3}, {3, 1}}, init);
    st.actor_target = mlp_init(Layout{{d, 3}, {3, 1}}, init);
    st.critic = mlp_init(Layout{{2 * d + 2, 4}, {4, 1}}, init);
    st.critic_target = mlp_init(Layout{{2 * d + 2, 4}, {4, 1}}, init);

    ReplayBuffer buf(16);
    RngStream data(seed, 1);
    for (int i = 0; i < 6; ++i) buf.push(random_transition(d, data));

    RngStream rng(seed, 2), twin(seed, 2);
    const auto idx = buf.sample_indices(4, twin);
    std::vector<Transition> batch;
    for (std::size_t j : idx) batch.push_back(buf.at(j));

    const Vector before = st.actor.flat;
    ddpg_update(st, buf, rng);
    const Vector g_impl = (st.actor.flat - before) / cfg.lr_actor;

    MlpParams probe = st.actor;
    probe.flat = before;
    const Vector g_fd = fd_params_gradient(
        probe,
        [&](const MlpParams& p) {
          return actor_objective(p, st.critic, cfg.transform, batch);
        },
        1e-6);
    CHECK(max_rel_error(g_impl, g_fd) < 1e-5);
  }
}

TEST_CASE("actor update differentiates through the freshly updated critic") {
  const std::uint64_t seed = 301;
  const int d = 1;
  DdpgConfig cfg;
  cfg.batch = 3;
  cfg.lr_critic = 0.7;
  cfg.lr_actor = 1.0;
  cfg.tau = 0.0;
  cfg.eta = 0.0;
  cfg.clip_norm = 1e12;

  DdpgState st;
  st.cfg = cfg;
  RngStream init(seed, 0);
  st.actor = mlp_init(Layout{{d, 3}, {3, 1}}, init);
  st.actor_target = mlp_init(Layout{{d, 3}, {3, 1}}, init);
  st.critic = mlp_init(Layout{{2 * d + 2, 4}, {4, 1}}, init);
  st.critic_target = mlp_init(Layout{{2 * d + 2, 4}, {4, 1}}, init);

  ReplayBuffer buf(8);
  RngStream data(seed, 1);
  for (int i = 0; i < 5; ++i) buf.push(random_transition(d, data));

  RngStream rng(seed, 2), twin(seed, 2);
  const auto idx = buf.sample_indices(3, twin);
  std::vector<Transition> batch;
  for (std::size_t j : idx) batch.push_back(buf.at(j));

  const MlpParams critic_before = st.critic;
  const Vector actor_before = st.actor.flat;
  ddpg_update(st, buf, rng);
  const Vector g_impl = (st.actor.flat - actor_before) / cfg.lr_actor;

  MlpParams probe = st.actor;
  probe.flat = actor_before;
  const Vector g_post = fd_params_gradient(
      probe,
      [&](const MlpParams& p) {
        return actor_objective(p, st.critic, cfg.transform, batch);
      },
      1e-6);
  const Vector g_pre = fd_params_gradient(
      probe,
      [&](const MlpParams& p) {
        return actor_objective(p, critic_before, cfg.transform, batch);
      },
      1e-6);
  CHECK(max_rel_error(g_impl, g_post) < 1e-5);
  // The critic moved, so the pre-update gradient is measurably different.
  CHECK((st.critic.flat - critic_before.flat).norm() > 1e-3);
  CHECK(max_rel_error(g_pre, g_post) > 1e-4);
}

TEST_CASE("raw-reward centring accumulates eta times the minibatch mean reward") {
  DdpgConfig cfg;
  cfg.batch = 5;
  cfg.lr_actor = 0.0;
  cfg.lr_critic = 0.0;
  cfg.tau = 0.0;
  cfg.eta = 0.25;
  cfg.centring = RewardCentring::RawReward;
  RngStream init(71, 0);
  DdpgState st = make_ddpg(1, cfg, init);

  ReplayBuffer buf(16);
  RngStream data(71, 1);
  for (int i = 0; i < 9; ++i) buf.push(random_transition(1, data));

  RngStream rng(71, 2), twin(71, 2);
  const auto idx = buf.sample_indices(5, twin);
  double mean_reward = 0.0;
  for (std::size_t j : idx) mean_reward += buf.at(j).reward / 5.0;

  UpdateMetrics metrics = ddpg_update(st, buf, rng);
  CHECK(st.r_bar == doctest::Approx(0.25 * mean_reward).epsilon(1e-12));
  CHECK(metrics.r_bar == st.r_bar);
}

TEST_CASE("td-residual centring uses the post-update critic and both gains") {
  DdpgConfig cfg;
  cfg.batch = 4;
  cfg.lr_actor = 0.0;
  cfg.lr_critic = 0.3;
  cfg.tau = 0.0;
  cfg.eta = 0.5;
  cfg.centring = RewardCentring::TdResidual;
  RngStream init(72, 0);
  DdpgState st = make_ddpg(1, cfg, init);
  const DdpgState pre = st;

  ReplayBuffer buf(16);
  RngStream data(72, 1);
  for (int i = 0; i < 7; ++i) buf.push(random_transition(1, data));

  RngStream rng(72, 2), twin(72, 2);
  const auto idx = buf.sample_indices(4, twin);

  ddpg_update(st, buf, rng);

  double mean_residual = 0.0;
  for (std::size_t j : idx) {
    const Transition& t = buf.at(j);
    const double q_new =
        forward_scalar(st.critic, stack_state(t.x, t.x_star, t.eps_x, t.eps_x_star));
    mean_residual += (q_target_of(t, pre) - q_new) / 4.0;
  }
  CHECK(st.r_bar == doctest::Approx(0.5 * 0.3 * mean_residual).epsilon(1e-9));
}

TEST_CASE("td-residual centring is inert when the critic learning rate is zero") {
  DdpgConfig cfg;
  cfg.batch = 4;
  cfg.lr_actor = 0.0;
  cfg.lr_critic = 0.0;
  cfg.tau = 0.0;
  cfg.eta = 0.5;
  cfg.centring = RewardCentring::TdResidual;
  RngStream init(73, 0);
  DdpgState st = make_ddpg(1, cfg, init);
  ReplayBuffer buf(16);
  RngStream data(73, 1);
  for (int i = 0; i < 6; ++i) buf.push(random_transition(1, data));
  RngStream rng(73, 2);
  ddpg_update(st, buf, rng);
  CHECK(st.r_bar == 0.0);
}

TEST_CASE("reported critic loss and mean q describe the pre-update critic") {
  DdpgConfig cfg;
  cfg.batch = 4;
  RngStream init(74, 0);
  DdpgState st = make_ddpg(2, cfg, init);
  const DdpgState pre = st;

  ReplayBuffer buf(16);
  RngStream data(74, 1);
  for (int i = 0; i < 8; ++i) buf.push(random_transition(2, data));

  RngStream rng(74, 2), twin(74, 2);
  const auto idx = buf.sample_indices(4, twin);
  std::vector<Transition> batch;
  std::vector<double> q_targets;
  double mean_q = 0.0;
  for (std::size_t j : idx) {
    const Transition& t = buf.at(j);
    batch.push_back(t);
    q_targets.push_back(q_target_of(t, pre));
    mean_q += forward_scalar(pre.critic,
                             stack_state(t.x, t.x_star, t.eps_x, t.eps_x_star)) /
              4.0;
  }
  UpdateMetrics metrics = ddpg_update(st, buf, rng);
  CHECK(metrics.critic_loss ==
        doctest::Approx(critic_loss_of(pre.critic, batch, q_targets)).epsilon(1e-12));
  CHECK(metrics.mean_q == doctest::Approx(mean_q).epsilon(1e-12));
}

TEST_CASE("target networks lag the online networks by the soft-update factor") {
  DdpgConfig cfg;
  cfg.batch = 4;
  cfg.lr_actor = 0.0;
  cfg.lr_critic = 0.0;
  cfg.eta = 0.0;
  cfg.tau = 0.25;
  RngStream init(75, 0);
  DdpgState st = make_ddpg(1, cfg, init);
  // Separate the targets so the gap is visible.
  st.actor_target.flat.array() += 1.0;
  st.critic_target.flat.array() += 1.0;

  ReplayBuffer buf(16);
  RngStream data(75, 1);
  for (int i = 0; i < 6; ++i) buf.push(random_transition(1, data));

  const double gap_a0 = (st.actor_target.flat - st.actor.flat).norm();
  const double gap_c0 = (st.critic_target.flat - st.critic.flat).norm();
  RngStream rng(75, 2);
  for (int k = 1; k <= 4; ++k) {
    ddpg_update(st, buf, rng);
    const double want = std::pow(1.0 - cfg.tau, k);
    CHECK((st.actor_target.flat - st.actor.flat).norm() ==
          doctest::Approx(want * gap_a0).epsilon(1e-10));
    CHECK((st.critic_target.flat - st.critic.flat).norm() ==
          doctest::Approx(want * gap_c0).epsilon(1e-10));
  }
}

TEST_CASE("neural_policy snapshots the actor") {
  ActionTransform tf;
  MlpParams actor = init_mlp(actor_layout(2), 81, 0);
  StepSizePolicy policy = neural_policy(actor, tf);
  CHECK(policy.kind == PolicyKind::Neural);
  const Vector x = RngStream(81, 1).normal_vector(2);
  const double before = policy.eval(x);
  CHECK(before == tf.apply(forward_scalar(actor, x)));
  actor.flat.array() += 3.0;
  CHECK(policy.eval(x) == before);
}
