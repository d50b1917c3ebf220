#pragma once

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "sqlion/features.hpp"

namespace sqlion {

// Which corpus a row came from: the attack capture or legitimate traffic.
enum class Provenance { malicious, legitimate };

inline std::string_view to_string(Provenance p) { return p == Provenance::malicious ? "mal" : "leg"; }

inline std::optional<Provenance> parse_provenance(std::string_view s) {
    if (s == "mal") return Provenance::malicious;
    if (s == "leg") return Provenance::legitimate;
    return std::nullopt;
}

struct LabeledRow {
    FeatureVector features; // label in 1..4
    Provenance provenance = Provenance::malicious;

    friend bool operator==(const LabeledRow&, const LabeledRow&) = default;
};

struct LabeledDataset {
    std::vector<LabeledRow> rows;

    std::size_t size() const { return rows.size(); }
    bool empty() const { return rows.empty(); }

    friend bool operator==(const LabeledDataset&, const LabeledDataset&) = default;
};

} // namespace sqlion
