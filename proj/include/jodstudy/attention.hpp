#pragma once

#include <algorithm>

namespace jodstudy {

/// Raw attention starts at 100 and is never clamped; only the displayed value is.
struct AttentionState {
    double raw = 100.0;
    int mistake_count = 0;
    int consecutive_correct = 0;

    friend bool operator==(const AttentionState&, const AttentionState&) = default;
};

inline double attention_penalty(int mistake_count) { return 1.0 + 0.4 * (mistake_count - 1); }
inline double attention_bonus(int consecutive_correct) { return 1.0 + 0.2 * (consecutive_correct - 1); }

/// Applies one golden-pair outcome. Counters move first, then exactly one of
/// penalty or bonus is applied using the updated counter.
inline AttentionState update_attention(AttentionState state, bool correct) {
    if (correct) {
        state.mistake_count = std::max(0, state.mistake_count - 1);
        ++state.consecutive_correct;
        state.raw += attention_bonus(state.consecutive_correct);
    } else {
        state.consecutive_correct = 0;
        ++state.mistake_count;
        state.raw -= attention_penalty(state.mistake_count);
    }
    return state;
}

inline double display_score(double raw) { return std::clamp(raw, 0.0, 100.0); }
inline double display_score(const AttentionState& state) { return display_score(state.raw); }

}  // namespace jodstudy
