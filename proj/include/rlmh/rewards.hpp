#pragma once

#include "rlmh/kernels.hpp"

namespace rlmh {

enum class RewardKind { Sjd, RbSjd, Lesjd, Cdlb };

RewardKind reward_kind_from_string(const std::string& s);
const char* reward_kind_name(RewardKind kind);

/// Accept/reject entropy -a log a - (1-a) log(1-a), endpoints 0.
double entropy_term(double alpha);

/// sjd:    |x - x_next|^2
/// rb_sjd: alpha |x - x_star|^2
/// lesjd:  log alpha + 2 log |x - x_star|   (floors 1e-300 / 1e-150)
/// cdlb:   alpha (log p(x*) - log p(x)) + entropy_term(alpha)
///         - alpha log q(x*|x), with 0 log 0 := 0
double compute_reward(RewardKind kind, const Transition& t);

}  // namespace rlmh
