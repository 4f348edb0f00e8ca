#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "genfilt/filter.hpp"

namespace genfilt {

inline constexpr std::string_view kBundleFormat = "genfilt-bundle/1";

/// Where a bundle came from. Parameter values are kept as strings so they
/// round-trip exactly.
struct Provenance {
    std::string generator;
    std::vector<std::pair<std::string, std::string>> params;

    const std::string* find(std::string_view key) const;
    friend bool operator==(const Provenance&, const Provenance&) = default;
};

/// On-disk form of a filter. Complex samples are written as pairs of shortest
/// round-trip decimal strings, so emit and parse are exact inverses.
struct FilterBundle {
    struct Entry {
        int i = 1;  ///< 1-based
        int j = 1;  ///< 1-based
        std::vector<Complex> samples;
        friend bool operator==(const Entry&, const Entry&) = default;
    };

    std::string format_version{kBundleFormat};
    int N = 2;
    std::int64_t L = 1;
    int K = 1;
    std::vector<IntervalSet> sigmas;
    std::vector<Entry> entries;  ///< row-major, all c*c of them
    std::optional<Provenance> provenance;

    friend bool operator==(const FilterBundle&, const FilterBundle&) = default;
};

std::string emit_bundle(const FilterBundle& b);
/// Throws ParseError on malformed input (bad JSON, wrong version, bad
/// numbers, wrong sample counts, missing or duplicate entries).
FilterBundle parse_bundle(std::string_view text);

FilterBundle bundle_from_filter(const FilterMatrix& H, std::optional<Provenance> provenance = std::nullopt);
/// Builds and validates the filter; construction errors propagate.
FilterMatrix bundle_to_filter(const FilterBundle& b);

/// Shortest decimal string that reads back to the same double.
std::string decimal(double x);
/// Nearest double to a decimal string; throws ParseError on junk.
double parse_decimal(std::string_view s);

}  // namespace genfilt
