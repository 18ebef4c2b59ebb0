#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "jodstudy/error.hpp"

namespace jodstudy {

/// One encode of a source, labelled RiVj: `rung` is the resolution rank
/// (1 = highest) and `variant` the encoder-setting variant within that rung.
struct EncodeVariant {
    std::string id;
    std::string source_id;
    int rung = 1;
    int variant = 0;
    int resolution = 0;  // vertical pixels
    int maxrate = 0;     // kbps
    int crf = 0;

    friend bool operator==(const EncodeVariant&, const EncodeVariant&) = default;
};

/// Encodes of one source ordered from the pseudo-reference (index 0) down.
struct QualityLadder {
    std::string source_id;
    std::vector<EncodeVariant> variants;

    const EncodeVariant& pseudo_reference() const { return variants.front(); }

    const EncodeVariant* find(std::string_view variant_id) const {
        for (const auto& v : variants)
            if (v.id == variant_id) return &v;
        return nullptr;
    }
};

enum class PairKind { Normal, SeedGolden, PromotedGolden };
enum class Side { None, Left, Right };
enum class Group { A, B, C };
enum class Phase { Training, Quiz, Main, Done, Disqualified };

constexpr std::string_view to_string(PairKind k) noexcept {
    switch (k) {
        case PairKind::Normal: return "Normal";
        case PairKind::SeedGolden: return "SeedGolden";
        case PairKind::PromotedGolden: return "PromotedGolden";
    }
    return "?";
}

constexpr std::string_view to_string(Side s) noexcept {
    switch (s) {
        case Side::None: return "None";
        case Side::Left: return "Left";
        case Side::Right: return "Right";
    }
    return "?";
}

constexpr std::string_view to_string(Group g) noexcept {
    switch (g) {
        case Group::A: return "A";
        case Group::B: return "B";
        case Group::C: return "C";
    }
    return "?";
}

constexpr std::string_view to_string(Phase p) noexcept {
    switch (p) {
        case Phase::Training: return "Training";
        case Phase::Quiz: return "Quiz";
        case Phase::Main: return "Main";
        case Phase::Done: return "Done";
        case Phase::Disqualified: return "Disqualified";
    }
    return "?";
}

inline Group group_from_string(std::string_view s) {
    if (s == "A") return Group::A;
    if (s == "B") return Group::B;
    if (s == "C") return Group::C;
    throw Error(ErrorCode::InvalidConfig, "unknown group '" + std::string(s) + "'");
}

inline PairKind pair_kind_from_string(std::string_view s) {
    if (s == "Normal") return PairKind::Normal;
    if (s == "SeedGolden") return PairKind::SeedGolden;
    if (s == "PromotedGolden") return PairKind::PromotedGolden;
    throw Error(ErrorCode::MalformedInput, "unknown pair kind '" + std::string(s) + "'");
}

inline Side side_from_string(std::string_view s) {
    if (s == "None") return Side::None;
    if (s == "Left") return Side::Left;
    if (s == "Right") return Side::Right;
    throw Error(ErrorCode::MalformedInput, "unknown side '" + std::string(s) + "'");
}

/// A scheduled A/B comparison. `left` plays first.
struct ComparisonPair {
    std::string pair_id;
    std::string source_id;
    std::string left;   // EncodeVariant id
    std::string right;  // EncodeVariant id
    PairKind kind = PairKind::Normal;
    Side expected_winner = Side::None;

    bool is_golden() const noexcept { return kind != PairKind::Normal; }

    friend bool operator==(const ComparisonPair&, const ComparisonPair&) = default;
};

/// Rater judgment: -1 = first (left) better, 0 = tie, +1 = second (right) better.
struct RaterResponse {
    std::string pair_id;
    std::string session_id;
    int choice = 0;
    int replay_count = 0;
    std::int64_t elapsed_ms = 0;

    friend bool operator==(const RaterResponse&, const RaterResponse&) = default;
};

inline void validate_choice(int choice) {
    if (choice < -1 || choice > 1)
        throw Error(ErrorCode::MalformedInput, "choice must be -1, 0 or +1");
}

struct Session {
    std::string session_id;
    Group group = Group::A;
    Phase phase = Phase::Main;
    std::vector<ComparisonPair> playlist;  // quiz prefix (if any) then main pairs
    std::size_t quiz_length = 0;
    std::size_t cursor = 0;
    std::vector<RaterResponse> response_log;
};

inline std::string make_pair_id(std::string_view source, std::string_view left,
                                std::string_view right) {
    std::string id;
    id.reserve(source.size() + left.size() + right.size() + 2);
    id.append(source).append(":").append(left).append(":").append(right);
    return id;
}

/// Checks the ladder invariants: at least one variant, unique ids, positive
/// rung/resolution/maxrate, strictly decreasing maxrate.
inline void validate_ladder(const QualityLadder& ladder) {
    if (ladder.variants.empty())
        throw Error(ErrorCode::LadderTooShort, "ladder '" + ladder.source_id + "' is empty");
    std::set<std::string> ids;
    for (std::size_t k = 0; k < ladder.variants.size(); ++k) {
        const auto& v = ladder.variants[k];
        if (v.rung < 1 || v.resolution <= 0 || v.maxrate <= 0 || v.variant < 0)
            throw Error(ErrorCode::InvalidConfig, "variant '" + v.id + "' has invalid encode parameters");
        if (!ids.insert(v.id).second)
            throw Error(ErrorCode::InvalidConfig, "duplicate variant id '" + v.id + "'");
        if (k > 0 && v.maxrate >= ladder.variants[k - 1].maxrate)
            throw Error(ErrorCode::InvalidConfig,
                        "maxrate must strictly decrease along ladder '" + ladder.source_id + "'");
    }
}

/// n-1 Normal pairs linking consecutive rungs of the ladder.
inline std::vector<ComparisonPair> build_chain_pairs(const QualityLadder& ladder) {
    if (ladder.variants.size() < 2)
        throw Error(ErrorCode::LadderTooShort,
                    "ladder '" + ladder.source_id + "' needs at least 2 variants for a chain");
    std::vector<ComparisonPair> pairs;
    pairs.reserve(ladder.variants.size() - 1);
    for (std::size_t k = 0; k + 1 < ladder.variants.size(); ++k) {
        const auto& hi = ladder.variants[k];
        const auto& lo = ladder.variants[k + 1];
        pairs.push_back({make_pair_id(ladder.source_id, hi.id, lo.id), ladder.source_id, hi.id, lo.id,
                         PairKind::Normal, Side::None});
    }
    return pairs;
}

/// Appended to a pair id when the same two encodes already form a chain link.
/// Deliberately neutral: ids are visible to clients.
inline constexpr std::string_view kRepeatSuffix = "#2";

/// Golden anchors against the pseudo-reference. Candidate order is
/// (variants[0] vs variants[3]) then (variants[0] vs variants[1]), i.e. R1V0-R3V1
/// first and R1V0-R1V1 second on the standard ladder.
inline std::vector<ComparisonPair> seed_golden_pairs(const QualityLadder& ladder, int count_per_source) {
    if (count_per_source < 0 || count_per_source > 2)
        throw Error(ErrorCode::InvalidConfig, "golden count per source must be 0, 1 or 2");
    if (count_per_source == 0) return {};
    if (ladder.variants.size() < 4)
        throw Error(ErrorCode::LadderTooShort,
                    "ladder '" + ladder.source_id + "' lacks the rung needed for golden anchors");
    const auto& ref = ladder.variants[0];
    std::vector<ComparisonPair> out;
    for (std::size_t idx : {std::size_t{3}, std::size_t{1}}) {
        if (static_cast<int>(out.size()) == count_per_source) break;
        const auto& other = ladder.variants[idx];
        auto id = make_pair_id(ladder.source_id, ref.id, other.id);
        if (idx == 1) id += kRepeatSuffix;
        out.push_back({std::move(id), ladder.source_id, ref.id, other.id, PairKind::SeedGolden, Side::Left});
    }
    return out;
}

/// All chain pairs plus seed golden pairs of every ladder, shuffled by `rng_seed`.
inline std::vector<ComparisonPair> build_study_playlist(const std::vector<QualityLadder>& ladders,
                                                        int golden_per_source, std::uint64_t rng_seed) {
    std::vector<ComparisonPair> out;
    for (const auto& ladder : ladders) {
        validate_ladder(ladder);
        auto chain = build_chain_pairs(ladder);
        auto golden = seed_golden_pairs(ladder, golden_per_source);
        out.insert(out.end(), chain.begin(), chain.end());
        out.insert(out.end(), golden.begin(), golden.end());
    }
    std::mt19937_64 rng(rng_seed);
    std::shuffle(out.begin(), out.end(), rng);
    return out;
}

/// Default curated quiz pairs: for every ladder, variants three rungs apart
/// (v0-v3, v1-v4, v2-v5, ...), with the higher-maxrate side as expected winner.
inline std::vector<ComparisonPair> default_quiz_pairs(const std::vector<QualityLadder>& ladders) {
    std::vector<ComparisonPair> out;
    for (const auto& ladder : ladders) {
        for (std::size_t k = 0; k + 3 < ladder.variants.size(); ++k) {
            const auto& hi = ladder.variants[k];
            const auto& lo = ladder.variants[k + 3];
            out.push_back({make_pair_id(ladder.source_id, hi.id, lo.id), ladder.source_id, hi.id, lo.id,
                           PairKind::Normal, Side::Left});
        }
    }
    return out;
}

/// Ladder used in the reference HDR study: six HEVC encodes at
/// 2160p/100000, 2160p/20000, 1440p/12000, 1080p/5000, 720p/1800 and 480p/600 kbps.
/// Only the pseudo-reference CRF (4) is fixed; the others default to 22.
inline QualityLadder standard_ladder(const std::string& source_id) {
    struct Row {
        const char* id;
        int rung, variant, resolution, maxrate, crf;
    };
    static constexpr Row rows[] = {
        {"R1V0", 1, 0, 2160, 100000, 4}, {"R1V1", 1, 1, 2160, 20000, 22}, {"R2V1", 2, 1, 1440, 12000, 22},
        {"R3V1", 3, 1, 1080, 5000, 22},  {"R4V1", 4, 1, 720, 1800, 22},   {"R5V1", 5, 1, 480, 600, 22},
    };
    QualityLadder ladder{source_id, {}};
    for (const auto& r : rows)
        ladder.variants.push_back({r.id, source_id, r.rung, r.variant, r.resolution, r.maxrate, r.crf});
    return ladder;
}

}  // namespace jodstudy
