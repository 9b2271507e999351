#include "rlmh/rewards.hpp"

#include <cmath>

namespace rlmh {

RewardKind reward_kind_from_string(const std::string& s) {
  if (s == "sjd") return RewardKind::Sjd;
  if (s == "rb_sjd") return RewardKind::RbSjd;
  if (s == "lesjd") return RewardKind::Lesjd;
  if (s == "cdlb") return RewardKind::Cdlb;
  throw Error(ErrorCode::UnknownKind, "unknown reward kind: " + s);
}

const char* reward_kind_name(RewardKind kind) {
  switch (kind) {
    case RewardKind::Sjd: return "sjd";
    case RewardKind::RbSjd: return "rb_sjd";
    case RewardKind::Lesjd: return "lesjd";
    case RewardKind::Cdlb: return "cdlb";
  }
  return "unknown";
}

double entropy_term(double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw Error(ErrorCode::OutOfRange, "entropy_term: alpha must lie in [0,1]");
  }
  double h = 0.0;
  if (alpha > 0.0) h -= alpha * std::log(alpha);
  if (alpha < 1.0) h -= (1.0 - alpha) * std::log(1.0 - alpha);
  return h;
}

namespace {

void check_transition(const Transition& t) {
  if (t.x.size() == 0 || t.x_star.size() == 0 || t.x_next.size() == 0) {
    throw Error(ErrorCode::IncompleteTransition, "transition is missing state fields");
  }
  if (!(t.alpha >= 0.0 && t.alpha <= 1.0)) {
    throw Error(ErrorCode::IncompleteTransition, "transition alpha outside [0,1]");
  }
}

constexpr double kAlphaFloor = 1e-300;
constexpr double kJumpFloor = 1e-150;

}  // namespace

double compute_reward(RewardKind kind, const Transition& t) {
  check_transition(t);
  switch (kind) {
    case RewardKind::Sjd:
      return (t.x - t.x_next).squaredNorm();
    case RewardKind::RbSjd:
      return t.alpha * (t.x - t.x_star).squaredNorm();
    case RewardKind::Lesjd: {
      const double jump = std::max((t.x - t.x_star).norm(), kJumpFloor);
      return std::log(std::max(t.alpha, kAlphaFloor)) + 2.0 * std::log(jump);
    }
    case RewardKind::Cdlb: {
      // 0 log 0 := 0 kills every alpha-weighted term at alpha = 0.
      if (t.alpha == 0.0) return 0.0;
      return t.alpha * (t.log_p_x_star - t.log_p_x) + entropy_term(t.alpha) -
             t.alpha * t.log_q_fwd;
    }
  }
  throw Error(ErrorCode::UnknownKind, "unknown reward kind");
}

}  // namespace rlmh
