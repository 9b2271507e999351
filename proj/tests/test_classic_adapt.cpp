#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "rlmh/classic_adapt.hpp"

using namespace rlmh;

namespace {

Transition jump_transition(double sq_jump, bool accepted) {
  Transition t;
  t.x = Vector::Zero(2);
  t.x_next = Vector::Zero(2);
  if (accepted) {
    t.x_next[0] = std::sqrt(sq_jump);
    t.accepted = true;
  }
  t.x_star = t.x_next;
  return t;
}

}  // namespace

TEST_CASE("esjd update repeats an improving move and reverses a failing one") {
  TunerState st;
  st.eps = 0.1;
  st.last_move_up = true;
  st.d1 = 2.0;
  st.d2 = 1.0;
  CHECK(update_step_size_esjd(st) == doctest::Approx(0.105).epsilon(1e-12));
  CHECK(st.last_move_up);

  st.eps = 0.1;
  st.last_move_up = true;
  st.d1 = 1.0;
  st.d2 = 2.0;
  CHECK(update_step_size_esjd(st) == doctest::Approx(0.1 / 1.05).epsilon(1e-12));
  CHECK(!st.last_move_up);

  st.eps = 0.1;
  st.last_move_up = false;
  st.d1 = 2.0;
  st.d2 = 1.0;
  CHECK(update_step_size_esjd(st) == doctest::Approx(0.1 / 1.05).epsilon(1e-12));

  st.eps = 0.1;
  st.last_move_up = false;
  st.d1 = 1.0;
  st.d2 = 2.0;
  CHECK(update_step_size_esjd(st) == doctest::Approx(0.105).epsilon(1e-12));
  CHECK(st.last_move_up);
}

TEST_CASE("esjd update clamps at both interval ends") {
  TunerState st;
  st.eps = 1.99;
  st.last_move_up = true;
  st.d1 = 2.0;
  st.d2 = 1.0;
  CHECK(update_step_size_esjd(st) == 2.0);

  st.eps = 1e-4;
  st.last_move_up = false;
  st.d1 = 2.0;
  st.d2 = 1.0;
  CHECK(update_step_size_esjd(st) == 1e-4);
}

TEST_CASE("esjd update needs two full windows") {
  TunerState st;
  st.d1 = 1.0;
  try {
    update_step_size_esjd(st);
    FAIL("expected InsufficientData");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InsufficientData);
  }
}

TEST_CASE("aar update follows the acceptance-rate feedback rule") {
  TunerState st;
  st.eps = 0.1;
  st.window_aar = 0.80;
  CHECK(update_step_size_aar(st) == doctest::Approx(0.105).epsilon(1e-12));

  st.eps = 0.1;
  st.window_aar = 0.30;
  CHECK(update_step_size_aar(st) == doctest::Approx(0.0952380952380952).epsilon(1e-12));

  // Ties break toward decrease.
  st.eps = 0.1;
  st.window_aar = 0.574;
  CHECK(update_step_size_aar(st) == doctest::Approx(0.1 / 1.05).epsilon(1e-12));
}

TEST_CASE("aar update needs one full window") {
  TunerState st;
  try {
    update_step_size_aar(st);
    FAIL("expected InsufficientData");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InsufficientData);
  }
}

TEST_CASE("two-window aar update hill-climbs on the target deviation") {
  TunerState st;
  st.eps = 0.2;
  st.last_move_up = true;
  st.d1 = 0.026;  // closer to the target than last window
  st.d2 = 0.100;
  CHECK(update_step_size_aar_two_window(st) == doctest::Approx(0.21).epsilon(1e-12));

  st.eps = 0.2;
  st.last_move_up = true;
  st.d1 = 0.200;  // drifted away, reverse
  st.d2 = 0.100;
  CHECK(update_step_size_aar_two_window(st) == doctest::Approx(0.2 / 1.05).epsilon(1e-12));
}

TEST_CASE("every update moves by exactly the factor modulo clamping") {
  TunerState st;
  RngStream rng(7, 0);
  for (int i = 0; i < 200; ++i) {
    const double before = st.eps;
    st.window_aar = rng.next_uniform();
    const double after = update_step_size_aar(st);
    CHECK(after >= st.lo);
    CHECK(after <= st.hi);
    const double up = std::min(st.hi, before * st.factor);
    const double dn = std::max(st.lo, before / st.factor);
    CHECK((after == up || after == dn));
  }
  TunerState se;
  for (int i = 0; i < 200; ++i) {
    const double before = se.eps;
    se.d1 = rng.next_uniform();
    se.d2 = rng.next_uniform();
    const double after = update_step_size_esjd(se);
    CHECK(after >= se.lo);
    CHECK(after <= se.hi);
    const double up = std::min(se.hi, before * se.factor);
    const double dn = std::max(se.lo, before / se.factor);
    CHECK((after == up || after == dn));
  }
}

TEST_CASE("updates validate bounds and factor") {
  TunerState st;
  st.window_aar = 0.5;
  st.lo = 0.0;
  try {
    update_step_size_aar(st);
    FAIL("expected InvalidBounds");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidBounds);
  }
  TunerState sf;
  sf.window_aar = 0.5;
  sf.factor = 1.0;
  try {
    update_step_size_aar(sf);
    FAIL("expected InvalidFactor");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidFactor);
  }
}

TEST_CASE("single-window aar tuner updates at each window boundary") {
  TunerState st;
  st.window = 10;
  StepSizeTuner tuner(TunerKind::Aar, st);
  for (int i = 0; i < 9; ++i) {
    CHECK(!tuner.observe(jump_transition(1.0, i < 8)));
  }
  // 8 accepts out of 10: window AAR 0.8 > 0.574, move up.
  CHECK(tuner.observe(jump_transition(1.0, false)));
  CHECK(tuner.eps() == doctest::Approx(0.105).epsilon(1e-12));
  CHECK(tuner.completed_windows() == 1);

  // Second window all rejected: AAR 0 < 0.574, move back down.
  for (int i = 0; i < 9; ++i) {
    CHECK(!tuner.observe(jump_transition(1.0, false)));
  }
  CHECK(tuner.observe(jump_transition(1.0, false)));
  CHECK(tuner.eps() == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(tuner.completed_windows() == 2);
}

TEST_CASE("esjd tuner waits for two windows then hill-climbs") {
  TunerState st;
  st.window = 5;
  StepSizeTuner tuner(TunerKind::Esjd, st);
  // First window: mean squared jump 4.
  for (int i = 0; i < 4; ++i) CHECK(!tuner.observe(jump_transition(4.0, true)));
  CHECK(!tuner.observe(jump_transition(4.0, true)));  // window done, no move yet
  CHECK(tuner.eps() == 0.1);
  CHECK(tuner.completed_windows() == 1);
  // Second window: mean squared jump 9 > 4, last move "up" by default, repeat.
  for (int i = 0; i < 4; ++i) CHECK(!tuner.observe(jump_transition(9.0, true)));
  CHECK(tuner.observe(jump_transition(9.0, true)));
  CHECK(tuner.eps() == doctest::Approx(0.105).epsilon(1e-12));
  // Third window: mean squared jump 1 < 9, reverse to a decrease.
  for (int i = 0; i < 4; ++i) CHECK(!tuner.observe(jump_transition(1.0, true)));
  CHECK(tuner.observe(jump_transition(1.0, true)));
  CHECK(tuner.eps() == doctest::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("rejected transitions contribute zero jump to the esjd statistic") {
  TunerState st;
  st.window = 2;
  StepSizeTuner tuner(TunerKind::Esjd, st);
  // Window one: jumps {4, 0} -> mean 2. Window two: all rejected -> mean 0.
  tuner.observe(jump_transition(4.0, true));
  tuner.observe(jump_transition(4.0, false));
  tuner.observe(jump_transition(0.0, false));
  tuner.observe(jump_transition(0.0, false));
  // 0 < 2 with default last-move-up: reverse, decrease.
  CHECK(tuner.eps() == doctest::Approx(0.1 / 1.05).epsilon(1e-12));
}

TEST_CASE("two-window aar tuner tracks the deviation from target") {
  TunerState st;
  st.window = 4;
  StepSizeTuner tuner(TunerKind::Aar, st, /*aar_two_window=*/true);
  // Window one: AAR 1.0 (deviation 0.426). No move yet.
  for (int i = 0; i < 4; ++i) tuner.observe(jump_transition(1.0, true));
  CHECK(tuner.eps() == 0.1);
  // Window two: AAR 0.5 (deviation 0.074 < 0.426): improvement, repeat up.
  tuner.observe(jump_transition(1.0, true));
  tuner.observe(jump_transition(1.0, true));
  tuner.observe(jump_transition(1.0, false));
  tuner.observe(jump_transition(1.0, false));
  CHECK(tuner.eps() == doctest::Approx(0.105).epsilon(1e-12));
}

TEST_CASE("tuner construction validates its inputs") {
  TunerState st;
  for (TunerKind kind : {TunerKind::None, TunerKind::Ddpg}) {
    try {
      StepSizeTuner tuner(kind, st);
      FAIL("expected InvalidParameter");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::InvalidParameter);
    }
  }
  TunerState sw;
  sw.window = 0;
  try {
    StepSizeTuner tuner(TunerKind::Aar, sw);
    FAIL("expected InvalidParameter");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidParameter);
  }
  TunerState sc;
  sc.eps = 5.0;
  StepSizeTuner clamped(TunerKind::Aar, sc);
  CHECK(clamped.eps() == 2.0);
}

TEST_CASE("tuner kind names round-trip") {
  for (TunerKind kind :
       {TunerKind::None, TunerKind::Aar, TunerKind::Esjd, TunerKind::Ddpg}) {
    CHECK(tuner_kind_from_string(tuner_kind_name(kind)) == kind);
  }
  try {
    tuner_kind_from_string("simulated-annealing");
    FAIL("expected UnknownKind");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UnknownKind);
  }
}
