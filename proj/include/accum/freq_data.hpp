#pragma once

// Abundance frequency counts n_j: the number of species observed exactly j
// times in the reference sample (effort scaled so the sample ends at t = 1).

#include <cstdint>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace accum {

/// Base for malformed or invalid input data.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParseError : public DataError {
public:
    ParseError(std::size_t line, const std::string& what)
        : DataError("line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class ValidationError : public DataError {
public:
    using DataError::DataError;
};

class FrequencyCounts {
public:
    using Map = std::map<std::int64_t, std::int64_t>;

    /// Zero entries are dropped; throws ValidationError on j < 1, n_j < 0 or
    /// when no species is observed.
    explicit FrequencyCounts(const Map& counts) {
        for (const auto& [j, n] : counts) {
            if (j < 1) throw ValidationError("frequency must be >= 1, got " + std::to_string(j));
            if (n < 0) throw ValidationError("count must be >= 0, got " + std::to_string(n));
            if (n > 0) counts_.emplace(j, n);
        }
        if (counts_.empty()) throw ValidationError("no observed species");
        for (const auto& [j, n] : counts_) {
            n_plus_ += n;
            individuals_ += j * n;
        }
    }

    const Map& counts() const noexcept { return counts_; }

    /// n_j, zero when j was not observed.
    std::int64_t operator[](std::int64_t j) const {
        auto it = counts_.find(j);
        return it == counts_.end() ? 0 : it->second;
    }

    std::int64_t n_plus() const noexcept { return n_plus_; }
    /// Number of sampled individuals a = sum_j j n_j.
    std::int64_t individuals() const noexcept { return individuals_; }
    /// Largest observed frequency d.
    std::int64_t max_frequency() const noexcept { return counts_.rbegin()->first; }
    std::size_t distinct_frequencies() const noexcept { return counts_.size(); }

    bool operator==(const FrequencyCounts&) const = default;

private:
    Map counts_;
    std::int64_t n_plus_ = 0;
    std::int64_t individuals_ = 0;
};

/// Per-species abundances Y_i(1) of the observed species.
class AbundanceSample {
public:
    explicit AbundanceSample(std::vector<std::int64_t> per_species) : per_species_(std::move(per_species)) {
        if (per_species_.empty()) throw ValidationError("empty abundance sample");
        for (auto y : per_species_)
            if (y < 1) throw ValidationError("abundances must be >= 1");
    }

    const std::vector<std::int64_t>& per_species() const noexcept { return per_species_; }

    std::int64_t individuals() const {
        return std::accumulate(per_species_.begin(), per_species_.end(), std::int64_t{0});
    }

    FrequencyCounts tally() const {
        FrequencyCounts::Map m;
        for (auto y : per_species_) ++m[y];
        return FrequencyCounts(m);
    }

    /// Expands counts into one abundance per species, in increasing order.
    static AbundanceSample from_counts(const FrequencyCounts& fc) {
        std::vector<std::int64_t> ys;
        ys.reserve(static_cast<std::size_t>(fc.n_plus()));
        for (const auto& [j, n] : fc.counts())
            ys.insert(ys.end(), static_cast<std::size_t>(n), j);
        return AbundanceSample(std::move(ys));
    }

private:
    std::vector<std::int64_t> per_species_;
};

enum class InputFormat { pairs, raw_abundances };

namespace detail {

inline std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_fields(std::string_view s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ',' || c == ' ' || c == '\t') {
            if (!cur.empty()) out.push_back(std::move(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (!cur.empty()) out.push_back(std::move(cur));
    return out;
}

inline std::int64_t parse_integer(const std::string& s, std::size_t line) {
    std::size_t pos = 0;
    long long v = 0;
    try {
        v = std::stoll(s, &pos);
    } catch (const std::exception&) {
        throw ParseError(line, "expected an integer, got '" + s + "'");
    }
    if (pos != s.size()) throw ParseError(line, "expected an integer, got '" + s + "'");
    return v;
}

}  // namespace detail

/// Reads frequency counts. `pairs` takes lines "j n_j" (whitespace or comma
/// separated, optional `frequency,count` header); `raw_abundances` takes one
/// abundance per line or comma-separated values and tallies them.
/// Blank lines and lines starting with '#' are ignored.
inline FrequencyCounts parse_counts(std::istream& in, InputFormat format) {
    FrequencyCounts::Map counts;
    std::string raw;
    std::size_t line_no = 0;
    bool seen_data = false;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto line = detail::trim(raw);
        if (line.empty() || line.front() == '#') continue;
        const auto fields = detail::split_fields(line);
        if (format == InputFormat::pairs) {
            if (!seen_data && fields.size() == 2 && fields[0] == "frequency" && fields[1] == "count") {
                seen_data = true;
                continue;
            }
            seen_data = true;
            if (fields.size() != 2) throw ParseError(line_no, "expected two fields 'j n_j'");
            const auto j = detail::parse_integer(fields[0], line_no);
            const auto n = detail::parse_integer(fields[1], line_no);
            if (j < 1) throw ValidationError("line " + std::to_string(line_no) + ": frequency must be >= 1");
            if (n < 0) throw ValidationError("line " + std::to_string(line_no) + ": count must be >= 0");
            if (!counts.emplace(j, n).second)
                throw ValidationError("line " + std::to_string(line_no) + ": duplicate frequency " +
                                      std::to_string(j));
        } else {
            seen_data = true;
            for (const auto& f : fields) {
                const auto y = detail::parse_integer(f, line_no);
                if (y < 0) throw ValidationError("line " + std::to_string(line_no) + ": negative abundance");
                if (y > 0) ++counts[y];
            }
        }
    }
    if (!seen_data) throw ParseError(line_no, "no data");
    return FrequencyCounts(counts);
}

inline FrequencyCounts parse_counts(std::string_view text, InputFormat format) {
    std::istringstream in{std::string(text)};
    return parse_counts(in, format);
}

/// Writes the `pairs` format, one "j n_j" line per observed frequency.
inline void write_counts(std::ostream& out, const FrequencyCounts& fc) {
    for (const auto& [j, n] : fc.counts()) out << j << ' ' << n << '\n';
}

inline std::string serialize(const FrequencyCounts& fc) {
    std::ostringstream out;
    write_counts(out, fc);
    return out.str();
}

/// n_x / n_plus; zero for unobserved x.
inline double empirical_density(const FrequencyCounts& fc, std::int64_t x) {
    return static_cast<double>(fc[x]) / static_cast<double>(fc.n_plus());
}

}  // namespace accum
