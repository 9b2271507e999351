#pragma once

#include <optional>

#include "rlmh/kernels.hpp"

namespace rlmh {

enum class TunerKind { None, Aar, Esjd, Ddpg };

TunerKind tuner_kind_from_string(const std::string& s);
const char* tuner_kind_name(TunerKind kind);

/// Window-based multiplicative step-size tuner state.
struct TunerState {
  double eps = 0.1;
  int window = 5000;
  double lo = 1e-4;
  double hi = 2.0;
  double factor = 1.05;
  double aar_target = 0.574;

  // Most recent complete window first.
  std::optional<double> d1;  // mean squared jump (esjd) or AAR deviation
  std::optional<double> d2;
  std::optional<double> window_aar;
  bool last_move_up = true;
};

/// Hill climb with direction memory: if the last move improved D1 over D2,
/// repeat it, else reverse; clamp to [lo, hi].
double update_step_size_esjd(TunerState& st);

/// Single-window feedback: AAR above target multiplies eps by factor,
/// otherwise (ties included) divides; clamp to [lo, hi].
double update_step_size_aar(TunerState& st);

/// Two-window AAR variant: compare |AAR - target| across windows like ESJD.
double update_step_size_aar_two_window(TunerState& st);

/// Accumulates per-step statistics and applies the update rule at each
/// window boundary.
class StepSizeTuner {
 public:
  StepSizeTuner(TunerKind kind, TunerState init, bool aar_two_window = false);

  /// Returns true when a window closed and eps was updated.
  bool observe(const Transition& t);

  double eps() const { return st_.eps; }
  const TunerState& state() const { return st_; }
  int completed_windows() const { return completed_windows_; }

 private:
  TunerKind kind_;
  TunerState st_;
  bool aar_two_window_;
  int count_ = 0;
  int accepted_ = 0;
  double sum_sq_jump_ = 0.0;
  int completed_windows_ = 0;
};

}  // namespace rlmh
