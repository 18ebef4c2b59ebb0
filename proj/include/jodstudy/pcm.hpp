#pragma once

#include <charconv>
#include <cstddef>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "jodstudy/error.hpp"
#include "jodstudy/model.hpp"

namespace jodstudy {

/// Pairwise comparison matrix. `wins(i, j)` is the (possibly fractional)
/// number of times condition i was preferred over j; `totals(i, j)` is the
/// number of i-vs-j comparisons and is symmetric.
class Pcm {
public:
    Pcm() = default;
    explicit Pcm(std::vector<std::string> conditions)
        : conditions_(std::move(conditions)),
          wins_(conditions_.size() * conditions_.size(), 0.0),
          totals_(conditions_.size() * conditions_.size(), 0.0) {}

    std::size_t size() const noexcept { return conditions_.size(); }
    const std::vector<std::string>& conditions() const noexcept { return conditions_; }

    std::size_t index_of(std::string_view id) const {
        for (std::size_t k = 0; k < conditions_.size(); ++k)
            if (conditions_[k] == id) return k;
        throw Error(ErrorCode::UnknownCondition, "condition '" + std::string(id) + "' not in PCM");
    }

    bool contains(std::string_view id) const {
        for (const auto& c : conditions_)
            if (c == id) return true;
        return false;
    }

    double wins(std::size_t i, std::size_t j) const { return wins_[i * size() + j]; }
    double totals(std::size_t i, std::size_t j) const { return totals_[i * size() + j]; }

    /// Sets c_ij and n_ij together with the mirrored entries c_ji = n - c, n_ji = n.
    void set(std::size_t i, std::size_t j, double c_ij, double n_ij) {
        if (i == j) throw Error(ErrorCode::MalformedInput, "PCM diagonal must stay zero");
        wins_[i * size() + j] = c_ij;
        wins_[j * size() + i] = n_ij - c_ij;
        totals_[i * size() + j] = n_ij;
        totals_[j * size() + i] = n_ij;
    }

    void add(std::size_t winner, std::size_t loser, double amount) { wins_[winner * size() + loser] += amount; }
    void add_total(std::size_t i, std::size_t j) {
        totals_[i * size() + j] += 1.0;
        totals_[j * size() + i] += 1.0;
    }

    double total_comparisons() const {
        double sum = 0.0;
        for (std::size_t i = 0; i < size(); ++i)
            for (std::size_t j = i + 1; j < size(); ++j) sum += totals(i, j);
        return sum;
    }

    friend bool operator==(const Pcm&, const Pcm&) = default;

private:
    std::vector<std::string> conditions_;
    std::vector<double> wins_;
    std::vector<double> totals_;
};

/// Adds one response. A tie credits half a win to each side.
inline Pcm accumulate(Pcm pcm, const ComparisonPair& pair, int choice) {
    validate_choice(choice);
    const auto l = pcm.index_of(pair.left);
    const auto r = pcm.index_of(pair.right);
    if (choice < 0) {
        pcm.add(l, r, 1.0);
    } else if (choice > 0) {
        pcm.add(r, l, 1.0);
    } else {
        pcm.add(l, r, 0.5);
        pcm.add(r, l, 0.5);
    }
    pcm.add_total(l, r);
    return pcm;
}

inline double empirical_prob(const Pcm& pcm, std::size_t i, std::size_t j) {
    const double n = pcm.totals(i, j);
    if (n <= 0.0)
        throw Error(ErrorCode::NoComparisons,
                    "no comparisons between '" + pcm.conditions()[i] + "' and '" + pcm.conditions()[j] + "'");
    return pcm.wins(i, j) / n;
}

inline double empirical_prob(const Pcm& pcm, std::string_view i, std::string_view j) {
    return empirical_prob(pcm, pcm.index_of(i), pcm.index_of(j));
}

inline std::string format_number(double value) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    if (ec != std::errc{}) throw Error(ErrorCode::MalformedInput, "cannot format number");
    return std::string(buf, ptr);
}

inline double parse_number(std::string_view text) {
    while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
    while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r')) text.remove_suffix(1);
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size())
        throw Error(ErrorCode::MalformedInput, "not a number: '" + std::string(text) + "'");
    return value;
}

inline std::vector<std::string> split_csv_line(std::string_view line) {
    std::vector<std::string> out;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        out.emplace_back(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

/// PCM text format:
///   line 1        condition ids, comma-separated
///   next k lines  win matrix C, row i = c_i0..c_i(k-1)
///   next k lines  total matrix N
/// Numbers use the shortest round-trip representation, so write/read is lossless.
inline void write_pcm(std::ostream& out, const Pcm& pcm) {
    const auto k = pcm.size();
    for (std::size_t i = 0; i < k; ++i) out << (i ? "," : "") << pcm.conditions()[i];
    out << '\n';
    for (int pass = 0; pass < 2; ++pass) {
        for (std::size_t i = 0; i < k; ++i) {
            for (std::size_t j = 0; j < k; ++j)
                out << (j ? "," : "") << format_number(pass == 0 ? pcm.wins(i, j) : pcm.totals(i, j));
            out << '\n';
        }
    }
}

inline std::string to_pcm_text(const Pcm& pcm) {
    std::ostringstream os;
    write_pcm(os, pcm);
    return os.str();
}

inline Pcm read_pcm(std::istream& in) {
    std::vector<std::string> lines;
    for (std::string line; std::getline(in, line);) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) lines.push_back(line);
    }
    if (lines.empty()) throw Error(ErrorCode::MalformedInput, "empty PCM file");
    auto ids = split_csv_line(lines[0]);
    const auto k = ids.size();
    if (lines.size() != 1 + 2 * k)
        throw Error(ErrorCode::MalformedInput, "PCM needs " + std::to_string(2 * k) + " matrix rows");
    std::vector<double> c(k * k), n(k * k);
    for (std::size_t row = 0; row < 2 * k; ++row) {
        auto cells = split_csv_line(lines[1 + row]);
        if (cells.size() != k) throw Error(ErrorCode::MalformedInput, "PCM row has wrong width");
        for (std::size_t j = 0; j < k; ++j)
            (row < k ? c : n)[(row % k) * k + j] = parse_number(cells[j]);
    }
    Pcm pcm(std::move(ids));
    for (std::size_t i = 0; i < k; ++i) {
        if (c[i * k + i] != 0.0 || n[i * k + i] != 0.0)
            throw Error(ErrorCode::MalformedInput, "PCM diagonal must be zero");
        for (std::size_t j = i + 1; j < k; ++j) {
            const double cij = c[i * k + j], cji = c[j * k + i], nij = n[i * k + j];
            if (cij < 0.0 || cji < 0.0 || nij != n[j * k + i] || cij + cji != nij)
                throw Error(ErrorCode::MalformedInput, "PCM entries (" + std::to_string(i) + "," +
                                                           std::to_string(j) + ") violate c_ij + c_ji = n_ij");
            pcm.set(i, j, cij, nij);
        }
    }
    return pcm;
}

inline Pcm from_pcm_text(const std::string& text) {
    std::istringstream is(text);
    return read_pcm(is);
}

}  // namespace jodstudy
