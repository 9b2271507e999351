#include "rlmh/kernels.hpp"

#include <cmath>
#include <limits>

namespace rlmh {

namespace {

double log_sigmoid(double t) {
  if (t >= 0.0) return -std::log1p(std::exp(-t));
  return t - std::log1p(std::exp(t));
}

void check_eps(double eps) {
  if (!std::isfinite(eps) || !(eps > 0.0)) {
    throw Error(ErrorCode::InvalidStepSize, "step size must be positive and finite");
  }
}

Vector rmala_mean_given(const Vector& z, double eps, const Vector& grad_z,
                        const Preconditioner& pc) {
  return z + eps * (pc.g0_inv->dense() * grad_z);
}

double rmala_log_q_given(const Vector& w, const Vector& z, double eps_z,
                         const Vector& grad_z, const Preconditioner& pc) {
  Vector mean = rmala_mean_given(z, eps_z, grad_z, pc);
  CholFactor factor = pc.g0_inv_chol().scaled(std::sqrt(2.0 * eps_z));
  return mvn_logpdf(w, mean, factor);
}

Vector barker_propose_given(const Vector& x, double sigma, const Vector& grad_x,
                            RngStream& rng) {
  Vector x_star(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double z = sigma * rng.next_normal();
    const double p_keep = 1.0 / (1.0 + std::exp(-z * grad_x[i]));
    const double b = rng.next_uniform() < p_keep ? 1.0 : -1.0;
    x_star[i] = x[i] + b * z;
  }
  return x_star;
}

double barker_log_q_given(const Vector& from, const Vector& to, double sigma,
                          const Vector& grad_from) {
  const double var = sigma * sigma;
  const double log_norm = -0.5 * std::log(2.0 * M_PI * var);
  double total = 0.0;
  for (Eigen::Index i = 0; i < from.size(); ++i) {
    const double w = to[i] - from[i];
    total += std::log(2.0) + log_norm - w * w / (2.0 * var) +
             log_sigmoid(w * grad_from[i]);
  }
  return total;
}

}  // namespace

Preconditioner Preconditioner::identity(int dim) {
  Preconditioner pc;
  pc.g0 = std::make_shared<SpdMatrix>(Matrix::Identity(dim, dim));
  pc.g0_inv = std::make_shared<SpdMatrix>(Matrix::Identity(dim, dim));
  pc.logdet_g0 = 0.0;
  return pc;
}

Preconditioner Preconditioner::from_g0(const Matrix& g0) {
  Preconditioner pc;
  pc.g0 = std::make_shared<SpdMatrix>(g0);
  const int d = pc.g0->dim();
  Matrix inv(d, d);
  for (int j = 0; j < d; ++j) {
    inv.col(j) = spd_solve(pc.g0->chol(), Vector::Unit(d, j));
  }
  inv = 0.5 * (inv + inv.transpose());
  pc.g0_inv = std::make_shared<SpdMatrix>(std::move(inv));
  pc.logdet_g0 = spd_logdet(pc.g0->chol());
  return pc;
}

Preconditioner Preconditioner::from_covariance(const Matrix& cov) {
  Preconditioner pc;
  pc.g0_inv = std::make_shared<SpdMatrix>(cov);
  const int d = pc.g0_inv->dim();
  Matrix g0(d, d);
  for (int j = 0; j < d; ++j) {
    g0.col(j) = spd_solve(pc.g0_inv->chol(), Vector::Unit(d, j));
  }
  g0 = 0.5 * (g0 + g0.transpose());
  pc.g0 = std::make_shared<SpdMatrix>(std::move(g0));
  pc.logdet_g0 = -spd_logdet(pc.g0_inv->chol());
  return pc;
}

StepSizePolicy StepSizePolicy::constant(double eps) {
  check_eps(eps);
  return StepSizePolicy{PolicyKind::Constant, [eps](const Vector&) { return eps; }};
}

Vector rmala_proposal_mean(const Vector& z, double eps, const Preconditioner& pc,
                           const TargetDistribution& target) {
  check_eps(eps);
  return rmala_mean_given(z, eps, target.grad_log_density(z), pc);
}

std::pair<Vector, double> rmala_propose(const Vector& x, const StepSizePolicy& policy,
                                        const Preconditioner& pc,
                                        const TargetDistribution& target,
                                        RngStream& rng) {
  const double eps = policy.eval(x);
  check_eps(eps);
  Vector grad_x = target.grad_log_density(x);
  if (!grad_x.allFinite()) {
    throw Error(ErrorCode::NonFinite, "gradient evaluation is non-finite");
  }
  Vector mean = rmala_mean_given(x, eps, grad_x, pc);
  CholFactor factor = pc.g0_inv_chol().scaled(std::sqrt(2.0 * eps));
  Vector x_star = mvn_sample(mean, factor, rng);
  const double log_q_fwd = mvn_logpdf(x_star, mean, factor);
  return {std::move(x_star), log_q_fwd};
}

double rmala_log_q(const Vector& w, const Vector& z, double eps_z,
                   const Preconditioner& pc, const TargetDistribution& target) {
  check_eps(eps_z);
  return rmala_log_q_given(w, z, eps_z, target.grad_log_density(z), pc);
}

double rmala_accept_log_ratio(const Vector& x, const Vector& x_star,
                              const StepSizePolicy& policy, const Preconditioner& pc,
                              const TargetDistribution& target) {
  const double eps_x = policy.eval(x);
  const double eps_xs = policy.eval(x_star);
  const double log_p_x = target.log_density(x);
  const double log_p_xs = target.log_density(x_star);
  const double log_q_fwd = rlmh::rmala_log_q(x_star, x, eps_x, pc, target);
  const double log_q_rev = rlmh::rmala_log_q(x, x_star, eps_xs, pc, target);
  return log_p_xs - log_p_x + log_q_rev - log_q_fwd;
}

Vector barker_propose(const Vector& x, const StepSizePolicy& policy,
                      const TargetDistribution& target, RngStream& rng) {
  const double sigma = policy.eval(x);
  check_eps(sigma);
  Vector grad_x = target.grad_log_density(x);
  if (!grad_x.allFinite()) {
    throw Error(ErrorCode::NonFinite, "gradient evaluation is non-finite");
  }
  return barker_propose_given(x, sigma, grad_x, rng);
}

double barker_log_q(const Vector& from, const Vector& to, double sigma,
                    const TargetDistribution& target) {
  check_eps(sigma);
  if (from.size() != to.size()) {
    throw Error(ErrorCode::DimensionMismatch, "barker_log_q: point lengths differ");
  }
  return barker_log_q_given(from, to, sigma, target.grad_log_density(from));
}

double barker_accept_log_ratio(const Vector& x, const Vector& x_star,
                               const StepSizePolicy& policy,
                               const TargetDistribution& target) {
  const double sigma_x = policy.eval(x);
  const double sigma_xs = policy.eval(x_star);
  const double log_p_x = target.log_density(x);
  const double log_p_xs = target.log_density(x_star);
  const double log_q_fwd = barker_log_q(x, x_star, sigma_x, target);
  const double log_q_rev = barker_log_q(x_star, x, sigma_xs, target);
  return log_p_xs - log_p_x + log_q_rev - log_q_fwd;
}

bool accept_decision(double alpha, double u) { return u < alpha; }

Transition mh_step_with(KernelKind kernel, const Vector& x,
                        const std::function<double(const Vector&)>& eval_eps,
                        const Preconditioner& pc, const TargetDistribution& target,
                        RngStream& rng) {
  Transition t;
  t.x = x;
  t.eps_x = eval_eps(x);
  check_eps(t.eps_x);
  t.log_p_x = target.log_density(x);
  Vector grad_x = target.grad_log_density(x);

  double log_ratio = -std::numeric_limits<double>::infinity();
  if (!std::isfinite(t.log_p_x) || !grad_x.allFinite()) {
    t.nonfinite = true;
    t.x_star = x;
    t.eps_x_star = t.eps_x;
    t.log_q_fwd = 0.0;
    t.log_p_x_star = t.log_p_x;
  } else if (kernel == KernelKind::Rmala) {
    Vector mean = rmala_mean_given(x, t.eps_x, grad_x, pc);
    CholFactor factor = pc.g0_inv_chol().scaled(std::sqrt(2.0 * t.eps_x));
    t.x_star = mvn_sample(mean, factor, rng);
    if (!t.x_star.allFinite()) {
      t.nonfinite = true;
      t.eps_x_star = t.eps_x;
      t.log_q_fwd = 0.0;
      t.log_p_x_star = -std::numeric_limits<double>::infinity();
    } else {
      t.log_q_fwd = mvn_logpdf(t.x_star, mean, factor);
      t.log_p_x_star = target.log_density(t.x_star);
      Vector grad_xs = target.grad_log_density(t.x_star);
      t.eps_x_star = eval_eps(t.x_star);
      check_eps(t.eps_x_star);
      if (!std::isfinite(t.log_p_x_star) || !grad_xs.allFinite()) {
        t.nonfinite = true;
      } else {
        const double log_q_rev =
            rmala_log_q_given(x, t.x_star, t.eps_x_star, grad_xs, pc);
        log_ratio = t.log_p_x_star - t.log_p_x + log_q_rev - t.log_q_fwd;
      }
    }
  } else {
    t.x_star = barker_propose_given(x, t.eps_x, grad_x, rng);
    if (!t.x_star.allFinite()) {
      t.nonfinite = true;
      t.eps_x_star = t.eps_x;
      t.log_q_fwd = 0.0;
      t.log_p_x_star = -std::numeric_limits<double>::infinity();
    } else {
      t.log_q_fwd = barker_log_q_given(x, t.x_star, t.eps_x, grad_x);
      t.log_p_x_star = target.log_density(t.x_star);
      Vector grad_xs = target.grad_log_density(t.x_star);
      t.eps_x_star = eval_eps(t.x_star);
      check_eps(t.eps_x_star);
      if (!std::isfinite(t.log_p_x_star) || !grad_xs.allFinite()) {
        t.nonfinite = true;
      } else {
        const double log_q_rev =
            barker_log_q_given(t.x_star, x, t.eps_x_star, grad_xs);
        log_ratio = t.log_p_x_star - t.log_p_x + log_q_rev - t.log_q_fwd;
      }
    }
  }

  t.alpha = t.nonfinite ? 0.0 : std::exp(std::min(0.0, log_ratio));
  const double u = rng.next_uniform();
  t.accepted = accept_decision(t.alpha, u);
  t.x_next = t.accepted ? t.x_star : t.x;
  return t;
}

Transition mh_step(KernelKind kernel, const Vector& x, const StepSizePolicy& policy,
                   const Preconditioner& pc, const TargetDistribution& target,
                   RngStream& rng) {
  return mh_step_with(kernel, x, policy.eval, pc, target, rng);
}

}  // namespace rlmh
