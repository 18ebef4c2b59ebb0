#pragma once

#include <cstdint>
#include <fstream>
#include <istream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "jodstudy/error.hpp"

namespace jodstudy {

struct EventRecord {
    std::uint64_t sequence = 0;
    std::int64_t timestamp_ms = 0;
    std::string type;  // study_created | session_created | response_submitted | phase_change | promotion
    nlohmann::json payload;

    nlohmann::json to_json() const {
        return {{"seq", sequence}, {"ts", timestamp_ms}, {"type", type}, {"payload", payload}};
    }

    static EventRecord from_json(const nlohmann::json& j) {
        try {
            return {j.at("seq").get<std::uint64_t>(), j.at("ts").get<std::int64_t>(), j.at("type").get<std::string>(),
                    j.at("payload")};
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorCode::MalformedInput, std::string("bad event record: ") + e.what());
        }
    }

    std::string to_line() const { return to_json().dump(); }
};

/// Append-only event log: one JSON record per line, sequence numbers
/// strictly increasing from 1. Records are kept in memory and, when a path
/// is given, appended and flushed to disk as they are written.
class EventLog {
public:
    EventLog() = default;
    explicit EventLog(std::string path) : path_(std::move(path)) {
        if (!path_.empty()) {
            file_.open(path_, std::ios::app);
            if (!file_) throw Error(ErrorCode::InvalidConfig, "cannot open event log '" + path_ + "'");
        }
    }

    EventLog(const EventLog&) = delete;
    EventLog& operator=(const EventLog&) = delete;

    /// Starts mirroring new records to `path` (append mode). Records already
    /// in memory are not written; use this after replaying that same file.
    void attach(std::string path) {
        path_ = std::move(path);
        file_.close();
        file_.open(path_, std::ios::app);
        if (!file_) throw Error(ErrorCode::InvalidConfig, "cannot open event log '" + path_ + "'");
    }

    const EventRecord& append(std::string type, nlohmann::json payload, std::int64_t timestamp_ms) {
        EventRecord rec{next_sequence_++, timestamp_ms, std::move(type), std::move(payload)};
        if (file_.is_open()) {
            file_ << rec.to_line() << '\n';
            file_.flush();
        }
        records_.push_back(std::move(rec));
        return records_.back();
    }

    const std::vector<EventRecord>& records() const noexcept { return records_; }

    std::string to_jsonl() const {
        std::string out;
        for (const auto& r : records_) out += r.to_line() + '\n';
        return out;
    }

    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
    std::ofstream file_;
    std::vector<EventRecord> records_;
    std::uint64_t next_sequence_ = 1;
};

inline std::vector<EventRecord> parse_event_log(std::istream& in) {
    std::vector<EventRecord> out;
    std::uint64_t last = 0;
    for (std::string line; std::getline(in, line);) {
        if (line.empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorCode::MalformedInput, std::string("event log line: ") + e.what());
        }
        auto rec = EventRecord::from_json(j);
        if (rec.sequence <= last) throw Error(ErrorCode::MalformedInput, "event sequence numbers must increase");
        last = rec.sequence;
        out.push_back(std::move(rec));
    }
    return out;
}

inline std::vector<EventRecord> read_event_log(const std::string& path) {
    std::ifstream in(path);
    if (!in) return {};
    return parse_event_log(in);
}

inline std::vector<EventRecord> parse_event_log(const std::string& text) {
    std::istringstream is(text);
    return parse_event_log(is);
}

}  // namespace jodstudy
