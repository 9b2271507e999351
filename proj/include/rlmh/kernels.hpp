#pragma once

#include <functional>
#include <memory>
#include <utility>

#include "rlmh/numkit.hpp"
#include "rlmh/targets.hpp"

namespace rlmh {

constexpr double kEpsMin = 1e-6;
constexpr double kEpsMax = 10.0;

/// Fixed SPD preconditioner G0 with cached inverse and factors.
struct Preconditioner {
  std::shared_ptr<SpdMatrix> g0;
  std::shared_ptr<SpdMatrix> g0_inv;
  double logdet_g0;

  static Preconditioner identity(int dim);
  static Preconditioner from_g0(const Matrix& g0);
  /// G0 = covariance^{-1} (the usual choice: inverse empirical covariance).
  static Preconditioner from_covariance(const Matrix& cov);

  const CholFactor& g0_inv_chol() const { return g0_inv->chol(); }
  int dim() const { return g0->dim(); }
};

enum class PolicyKind { Constant, Neural };

/// Maps a chain state to a positive step size. Deterministic given
/// parameters; the eval callable must stay within [kEpsMin, kEpsMax].
struct StepSizePolicy {
  PolicyKind kind;
  std::function<double(const Vector&)> eval;

  static StepSizePolicy constant(double eps);
};

enum class KernelKind { Rmala, Barker };

/// One MDP step record; reward is filled by the rewards module.
struct Transition {
  Vector x;
  Vector x_star;
  Vector x_next;
  double alpha = 0.0;
  bool accepted = false;
  double eps_x = 0.0;       // action component at x
  double eps_x_star = 0.0;  // action component at x_star
  double log_q_fwd = 0.0;
  double log_p_x = 0.0;
  double log_p_x_star = 0.0;
  double reward = 0.0;
  bool nonfinite = false;  // proposal or density evaluation was non-finite
};

/// Proposal mean nu(z) = z + eps(z) G0^{-1} grad log p(z).
Vector rmala_proposal_mean(const Vector& z, double eps, const Preconditioner& pc,
                           const TargetDistribution& target);

std::pair<Vector, double> rmala_propose(const Vector& x, const StepSizePolicy& policy,
                                        const Preconditioner& pc,
                                        const TargetDistribution& target,
                                        RngStream& rng);

/// log N(w; nu(z), 2 eps(z) G0^{-1}).
double rmala_log_q(const Vector& w, const Vector& z, double eps_z,
                   const Preconditioner& pc, const TargetDistribution& target);

double rmala_accept_log_ratio(const Vector& x, const Vector& x_star,
                              const StepSizePolicy& policy, const Preconditioner& pc,
                              const TargetDistribution& target);

Vector barker_propose(const Vector& x, const StepSizePolicy& policy,
                      const TargetDistribution& target, RngStream& rng);

/// Exact Barker forward log-density: per coordinate
/// log[2 phi_sigma(w_j)] + log sigmoid(w_j g_j), w = to - from.
double barker_log_q(const Vector& from, const Vector& to, double sigma,
                    const TargetDistribution& target);

double barker_accept_log_ratio(const Vector& x, const Vector& x_star,
                               const StepSizePolicy& policy,
                               const TargetDistribution& target);

/// Accept iff u < alpha.
bool accept_decision(double alpha, double u);

/// One propose-accept cycle. The step-size callable is invoked exactly once
/// at x and once at x_star (in that order), so stochastic behaviour policies
/// stay consistent between proposal and acceptance.
Transition mh_step_with(KernelKind kernel, const Vector& x,
                        const std::function<double(const Vector&)>& eval_eps,
                        const Preconditioner& pc, const TargetDistribution& target,
                        RngStream& rng);

Transition mh_step(KernelKind kernel, const Vector& x, const StepSizePolicy& policy,
                   const Preconditioner& pc, const TargetDistribution& target,
                   RngStream& rng);

}  // namespace rlmh
