#pragma once

#include <compare>
#include <optional>
#include <string>
#include <string_view>

#include "sqlion/dictionary.hpp"
#include "sqlion/error.hpp"
#include "sqlion/features.hpp"

namespace sqlion {

// 1 without risk, 2 small risk, 3 risk, 4 high risk.
class RiskLevel {
public:
    static constexpr int min = 1;
    static constexpr int max = 4;

    constexpr explicit RiskLevel(int value) : value_(value) {
        if (value < min || value > max) throw InvalidArgument("risk level out of range: " + std::to_string(value));
    }

    constexpr int value() const { return value_; }

    friend constexpr auto operator<=>(RiskLevel, RiskLevel) = default;

private:
    int value_;
};

enum class Verdict { benign, suspicious, attack };

inline std::string_view to_string(Verdict v) {
    switch (v) {
    case Verdict::benign: return "benign";
    case Verdict::suspicious: return "suspicious";
    case Verdict::attack: return "attack";
    }
    return "benign";
}

inline std::optional<Verdict> parse_verdict(std::string_view s) {
    if (s == "benign") return Verdict::benign;
    if (s == "suspicious") return Verdict::suspicious;
    if (s == "attack") return Verdict::attack;
    return std::nullopt;
}

inline constexpr int default_block_threshold = 3;

/// Rule-based risk level of a counted query.
///
/// The base level is the highest tier among alphabetic patterns present
/// (1 when none is). Symbol groups then apply once each, in order A, B, C,
/// against the running level: A adds one below 4, B below 3, C below 2. Only
/// presence matters, never the counts themselves.
inline RiskLevel assign_risk(const FeatureVector& fv, const TokenDictionary& dict) {
    int level = 1;
    const auto& alpha = dict.alphabetic();
    for (std::size_t i = 0; i < alpha.size(); ++i) {
        if (fv.counts[i] > 0 && alpha[i].tier > level) level = alpha[i].tier;
    }

    bool present[3] = {false, false, false};
    const auto& sym = dict.symbols();
    for (std::size_t i = 0; i < sym.size(); ++i) {
        if (fv.counts[alphabetic_pattern_count + i] > 0) present[static_cast<int>(sym[i].group)] = true;
    }
    if (present[0] && level < 4) ++level;
    if (present[1] && level < 3) ++level;
    if (present[2] && level < 2) ++level;
    return RiskLevel(level);
}

/// attack at or above the threshold, suspicious one below it (never for
/// threshold 2), benign otherwise.
inline Verdict verdict_from_level(RiskLevel level, int block_threshold = default_block_threshold) {
    if (block_threshold < 2 || block_threshold > 4)
        throw InvalidArgument("block threshold must be 2, 3 or 4, got " + std::to_string(block_threshold));
    if (level.value() >= block_threshold) return Verdict::attack;
    if (block_threshold > 2 && level.value() == block_threshold - 1) return Verdict::suspicious;
    return Verdict::benign;
}

/// normalize -> count_features -> assign_risk in one call.
inline FeatureVector label_query(std::string_view raw, const TokenDictionary& dict) {
    FeatureVector fv = count_features(normalize(raw), dict);
    fv.label = assign_risk(fv, dict).value();
    return fv;
}

} // namespace sqlion
