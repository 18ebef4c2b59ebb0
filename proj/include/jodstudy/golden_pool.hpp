#pragma once

#include <cmath>
#include <cstdlib>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "jodstudy/error.hpp"
#include "jodstudy/model.hpp"

namespace jodstudy {

/// Running tallies of -1/0/+1 answers for one pair. Mean and population
/// standard deviation are derived from the counts, so the result does not
/// depend on arrival order.
struct PairStats {
    std::string pair_id;
    int n = 0;
    int count_left = 0;
    int count_tie = 0;
    int count_right = 0;
    double mean = 0.0;
    double stddev = 0.0;

    friend bool operator==(const PairStats&, const PairStats&) = default;
};

inline PairStats record(PairStats stats, int choice) {
    validate_choice(choice);
    if (choice < 0) ++stats.count_left;
    else if (choice > 0) ++stats.count_right;
    else ++stats.count_tie;
    stats.n = stats.count_left + stats.count_tie + stats.count_right;

    const double n = stats.n;
    stats.mean = static_cast<double>(stats.count_right - stats.count_left) / n;
    // E[x^2] is the fraction of non-tie answers since x^2 = 1 for x = +-1.
    const double second_moment = static_cast<double>(stats.count_right + stats.count_left) / n;
    stats.stddev = std::sqrt(std::max(0.0, second_moment - stats.mean * stats.mean));
    return stats;
}

inline double agreement(const PairStats& stats) {
    if (stats.n == 0) throw Error(ErrorCode::EmptyStats, "no responses for '" + stats.pair_id + "'");
    return static_cast<double>(std::max(stats.count_left, stats.count_right)) / stats.n;
}

enum class GoldenState { Pending, Promoted, Excluded };

struct GoldenStatus {
    GoldenState state = GoldenState::Pending;
    Side winner = Side::None;  // set only when Promoted

    friend bool operator==(const GoldenStatus&, const GoldenStatus&) = default;
};

constexpr std::string_view to_string(GoldenState s) noexcept {
    switch (s) {
        case GoldenState::Pending: return "Pending";
        case GoldenState::Promoted: return "Promoted";
        case GoldenState::Excluded: return "Excluded";
    }
    return "?";
}

struct GoldenThresholds {
    int min_ratings = 20;
    double min_abs_mean = 0.5;     // promote: |mean| > this
    double max_promote_std = 0.3;  // promote: std < this
    double min_agreement = 0.75;   // promote: agreement >= this
    double exclude_abs_mean = 0.5; // exclude: |mean| < this
    double exclude_std = 0.5;      // exclude: std > this
};

/// Promotion wins over exclusion only in name: the two predicates cannot both
/// hold. Anything in between stays Pending until more answers arrive.
inline GoldenStatus evaluate(const PairStats& stats, const GoldenThresholds& t = {}) {
    if (stats.n < t.min_ratings || stats.n == 0) return {};
    const double abs_mean = std::abs(stats.mean);
    if (abs_mean > t.min_abs_mean && stats.stddev < t.max_promote_std && agreement(stats) >= t.min_agreement)
        return {GoldenState::Promoted, stats.mean > 0 ? Side::Right : Side::Left};
    if (abs_mean < t.exclude_abs_mean || stats.stddev > t.exclude_std) return {GoldenState::Excluded, Side::None};
    return {};
}

inline GoldenStatus evaluate(const PairStats& stats, int min_ratings) {
    GoldenThresholds t;
    t.min_ratings = min_ratings;
    return evaluate(stats, t);
}

/// Shared per-study pool of pair statistics. record-and-evaluate is atomic
/// per call; the returned value says whether the pair's status changed.
class GoldenPool {
public:
    struct Entry {
        PairStats stats;
        GoldenStatus status;
    };

    struct Update {
        GoldenStatus before;
        GoldenStatus after;
        bool changed() const { return !(before == after); }
    };

    explicit GoldenPool(GoldenThresholds thresholds = {}) : thresholds_(thresholds) {}

    GoldenPool(const GoldenPool& other) {
        std::lock_guard lock(other.mutex_);
        thresholds_ = other.thresholds_;
        entries_ = other.entries_;
    }

    GoldenPool& operator=(const GoldenPool&) = delete;

    Update record_and_evaluate(const std::string& pair_id, int choice) {
        std::lock_guard lock(mutex_);
        auto& entry = entries_[pair_id];
        entry.stats.pair_id = pair_id;
        Update u{entry.status, {}};
        entry.stats = record(entry.stats, choice);
        entry.status = evaluate(entry.stats, thresholds_);
        u.after = entry.status;
        return u;
    }

    GoldenStatus status(const std::string& pair_id) const {
        std::lock_guard lock(mutex_);
        auto it = entries_.find(pair_id);
        return it == entries_.end() ? GoldenStatus{} : it->second.status;
    }

    std::map<std::string, Entry> snapshot() const {
        std::lock_guard lock(mutex_);
        return entries_;
    }

    const GoldenThresholds& thresholds() const noexcept { return thresholds_; }

private:
    GoldenThresholds thresholds_;
    mutable std::mutex mutex_;
    std::map<std::string, Entry> entries_;
};

/// Applies the pool's current verdicts to a fresh playlist: consensus pairs
/// become PromotedGolden and excluded pairs lose golden status.
inline std::vector<ComparisonPair> apply_pool(std::vector<ComparisonPair> playlist, const GoldenPool& pool) {
    for (auto& pair : playlist) {
        const auto status = pool.status(pair.pair_id);
        if (status.state == GoldenState::Promoted && pair.kind == PairKind::Normal) {
            pair.kind = PairKind::PromotedGolden;
            pair.expected_winner = status.winner;
        } else if (status.state == GoldenState::Excluded && pair.is_golden()) {
            pair.kind = PairKind::Normal;
            pair.expected_winner = Side::None;
        }
    }
    return playlist;
}

}  // namespace jodstudy
