#include "rlmh/classic_adapt.hpp"

#include <algorithm>
#include <cmath>

namespace rlmh {

TunerKind tuner_kind_from_string(const std::string& s) {
  if (s == "none") return TunerKind::None;
  if (s == "aar") return TunerKind::Aar;
  if (s == "esjd") return TunerKind::Esjd;
  if (s == "ddpg") return TunerKind::Ddpg;
  throw Error(ErrorCode::UnknownKind, "unknown tuner kind: " + s);
}

const char* tuner_kind_name(TunerKind kind) {
  switch (kind) {
    case TunerKind::None: return "none";
    case TunerKind::Aar: return "aar";
    case TunerKind::Esjd: return "esjd";
    case TunerKind::Ddpg: return "ddpg";
  }
  return "unknown";
}

namespace {

void check_tuner_bounds(const TunerState& st) {
  if (!(st.lo > 0.0 && st.hi > st.lo)) {
    throw Error(ErrorCode::InvalidBounds, "tuner bounds must satisfy 0 < lo < hi");
  }
  if (!(st.factor > 1.0)) {
    throw Error(ErrorCode::InvalidFactor, "tuner factor must exceed 1");
  }
}

double apply_move(TunerState& st, bool up) {
  st.eps = up ? st.eps * st.factor : st.eps / st.factor;
  st.eps = std::clamp(st.eps, st.lo, st.hi);
  st.last_move_up = up;
  return st.eps;
}

}  // namespace

double update_step_size_esjd(TunerState& st) {
  check_tuner_bounds(st);
  if (!st.d1.has_value() || !st.d2.has_value()) {
    throw Error(ErrorCode::InsufficientData, "esjd update needs two full windows");
  }
  const bool improved = *st.d1 > *st.d2;
  return apply_move(st, improved ? st.last_move_up : !st.last_move_up);
}

double update_step_size_aar(TunerState& st) {
  check_tuner_bounds(st);
  if (!st.window_aar.has_value()) {
    throw Error(ErrorCode::InsufficientData, "aar update needs one full window");
  }
  return apply_move(st, *st.window_aar > st.aar_target);
}

double update_step_size_aar_two_window(TunerState& st) {
  check_tuner_bounds(st);
  if (!st.d1.has_value() || !st.d2.has_value()) {
    throw Error(ErrorCode::InsufficientData, "two-window aar update needs two windows");
  }
  // Deviations from target: smaller is better.
  const bool improved = *st.d1 < *st.d2;
  return apply_move(st, improved ? st.last_move_up : !st.last_move_up);
}

StepSizeTuner::StepSizeTuner(TunerKind kind, TunerState init, bool aar_two_window)
    : kind_(kind), st_(init), aar_two_window_(aar_two_window) {
  if (kind_ != TunerKind::Aar && kind_ != TunerKind::Esjd) {
    throw Error(ErrorCode::InvalidParameter, "tuner accumulates only aar or esjd");
  }
  if (st_.window < 1) {
    throw Error(ErrorCode::InvalidParameter, "tuner window must be >= 1");
  }
  check_tuner_bounds(st_);
  st_.eps = std::clamp(st_.eps, st_.lo, st_.hi);
}

bool StepSizeTuner::observe(const Transition& t) {
  ++count_;
  if (t.accepted) ++accepted_;
  sum_sq_jump_ += (t.x - t.x_next).squaredNorm();
  if (count_ < st_.window) return false;

  const double window_aar = static_cast<double>(accepted_) / count_;
  const double window_esjd = sum_sq_jump_ / count_;
  count_ = 0;
  accepted_ = 0;
  sum_sq_jump_ = 0.0;
  ++completed_windows_;

  if (kind_ == TunerKind::Aar && !aar_two_window_) {
    st_.window_aar = window_aar;
    update_step_size_aar(st_);
    return true;
  }

  const double stat = kind_ == TunerKind::Aar
                          ? std::abs(window_aar - st_.aar_target)
                          : window_esjd;
  st_.d2 = st_.d1;
  st_.d1 = stat;
  if (!st_.d2.has_value()) return false;  // need two windows before the first move
  if (kind_ == TunerKind::Aar) {
    update_step_size_aar_two_window(st_);
  } else {
    update_step_size_esjd(st_);
  }
  return true;
}

}  // namespace rlmh
