#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "jodstudy/error.hpp"
#include "jodstudy/model.hpp"
#include "jodstudy/pcm.hpp"

namespace jodstudy {

/// What the reporting layer needs from one finished session.
struct SessionRecord {
    std::string session_id;
    Group group = Group::A;
    std::vector<int> main_choices;           // main-phase answers only
    std::vector<double> attention_trajectory;  // raw score: initial value, then after each main pair
    int total_replays = 0;
    std::int64_t total_elapsed_ms = 0;
};

struct GroupSummary {
    std::string group;
    double attention_average = 0.0;
    double attention_auc = 0.0;
    double study_time_minutes = 0.0;
    double replay_count_mean = 0.0;
    double tie_rate_percent = 0.0;
};

inline double tie_rate(std::span<const int> choices) {
    if (choices.empty()) throw Error(ErrorCode::EmptyInput, "tie rate of no responses");
    const auto ties = std::count(choices.begin(), choices.end(), 0);
    return 100.0 * static_cast<double>(ties) / static_cast<double>(choices.size());
}

/// Trapezoidal area under the trajectory with unit spacing between events.
inline double attention_auc(std::span<const double> trajectory) {
    if (trajectory.empty()) throw Error(ErrorCode::EmptyInput, "AUC of empty trajectory");
    double area = 0.0;
    for (std::size_t k = 1; k < trajectory.size(); ++k) area += 0.5 * (trajectory[k - 1] + trajectory[k]);
    return area;
}

inline double attention_average(std::span<const double> trajectory) {
    if (trajectory.empty()) throw Error(ErrorCode::EmptyInput, "average of empty trajectory");
    double sum = 0.0;
    for (double v : trajectory) sum += v;
    return sum / static_cast<double>(trajectory.size());
}

/// Per-session metrics averaged over sessions. Every session must have at
/// least one main-phase answer and a non-empty trajectory.
inline GroupSummary summarize_group(std::span<const SessionRecord> sessions, std::string group_label = {}) {
    if (sessions.empty()) throw Error(ErrorCode::EmptyInput, "no sessions to summarize");
    GroupSummary s;
    s.group = group_label.empty() ? std::string(to_string(sessions.front().group)) : std::move(group_label);
    for (const auto& rec : sessions) {
        s.attention_average += attention_average(rec.attention_trajectory);
        s.attention_auc += attention_auc(rec.attention_trajectory);
        s.study_time_minutes += static_cast<double>(rec.total_elapsed_ms) / 60000.0;
        s.replay_count_mean += rec.total_replays;
        s.tie_rate_percent += tie_rate(rec.main_choices);
    }
    const auto n = static_cast<double>(sessions.size());
    s.attention_average /= n;
    s.attention_auc /= n;
    s.study_time_minutes /= n;
    s.replay_count_mean /= n;
    s.tie_rate_percent /= n;
    return s;
}

inline constexpr const char* kSummaryHeader =
    "group,attention_average,attention_auc,study_time_minutes,replay_count_mean,tie_rate_percent";

inline void write_summary(std::ostream& out, std::span<const GroupSummary> rows) {
    out << kSummaryHeader << '\n';
    for (const auto& r : rows)
        out << r.group << ',' << format_number(r.attention_average) << ',' << format_number(r.attention_auc) << ','
            << format_number(r.study_time_minutes) << ',' << format_number(r.replay_count_mean) << ','
            << format_number(r.tie_rate_percent) << '\n';
}

inline std::string to_summary_text(std::span<const GroupSummary> rows) {
    std::ostringstream os;
    write_summary(os, rows);
    return os.str();
}

/// Groups sessions by group id and summarises each group that has sessions
/// with main-phase data. Groups come out in A, B, C order.
inline std::vector<GroupSummary> summarize_by_group(std::span<const SessionRecord> sessions) {
    std::vector<GroupSummary> rows;
    for (Group g : {Group::A, Group::B, Group::C}) {
        std::vector<SessionRecord> members;
        for (const auto& s : sessions)
            if (s.group == g && !s.main_choices.empty() && !s.attention_trajectory.empty()) members.push_back(s);
        if (!members.empty()) rows.push_back(summarize_group(members));
    }
    return rows;
}

}  // namespace jodstudy
