#pragma once

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sqlion/codec.hpp"
#include "sqlion/dictionary.hpp"
#include "sqlion/error.hpp"
#include "sqlion/normalize.hpp"

namespace sqlion {

/// Label value of a vector that has not been through the risk labeler.
inline constexpr int unlabeled = 0;

// 50 pattern counts in dictionary order plus the risk label: the 51-column
// training row.
struct FeatureVector {
    std::array<std::uint32_t, feature_count> counts{};
    int label = unlabeled;

    friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

namespace detail {

// Maximal-munch scan: at each position take the longest pattern (or digit
// run) that starts there, consume it, and continue after it.
inline void scan_projection(std::string_view s, const PatternTrie& trie, int digit_class_index, FeatureVector& fv) {
    std::size_t i = 0;
    while (i < s.size()) {
        auto m = trie.longest_at(s, i);
        if (digit_class_index >= 0 && codec::is_ascii_digit(static_cast<unsigned char>(s[i]))) {
            std::size_t run = 1;
            while (i + run < s.size() && codec::is_ascii_digit(static_cast<unsigned char>(s[i + run]))) ++run;
            // A literal pattern of equal length wins the tie.
            if (run > m.length) m = {digit_class_index, run};
        }
        if (m.feature >= 0) {
            ++fv.counts[static_cast<std::size_t>(m.feature)];
            i += m.length;
        } else {
            ++i;
        }
    }
}

} // namespace detail

/// Counts dictionary patterns in a normalized query. Alphabetic patterns (and
/// letter-bearing hex prefixes) are matched on l1, the remaining symbols and
/// the digit class on l2; matches never overlap within a projection.
inline FeatureVector count_features(const NormalizedQuery& q, const TokenDictionary& dict) {
    FeatureVector fv;
    detail::scan_projection(q.l1, dict.l1_trie(), -1, fv);
    detail::scan_projection(q.l2, dict.l2_trie(), dict.digit_class_index(), fv);
    return fv;
}

enum class FrequencyMode { alphabetic_words, single_symbols };

struct FrequencyReport {
    FrequencyMode mode = FrequencyMode::alphabetic_words;
    std::vector<std::pair<std::string, std::uint64_t>> entries; // count desc, token asc

    friend bool operator==(const FrequencyReport&, const FrequencyReport&) = default;
};

/// Token frequencies over a corpus, the raw material for build_dictionary.
///
/// Word mode counts maximal [a-z]+ runs of the lowercased text (whitespace
/// still present, so words stay separate). Symbol mode counts every printable
/// ASCII character that is neither alphanumeric nor whitespace, after one
/// round of percent and entity decoding.
inline FrequencyReport frequency_analysis(const std::vector<RawQuery>& corpus, FrequencyMode mode) {
    std::map<std::string, std::uint64_t> counts;
    for (const auto& q : corpus) {
        if (mode == FrequencyMode::alphabetic_words) {
            std::string word;
            for (unsigned char c : q.text) {
                char lc = codec::to_lower(c);
                if (lc >= 'a' && lc <= 'z') {
                    word.push_back(lc);
                } else if (!word.empty()) {
                    ++counts[word];
                    word.clear();
                }
            }
            if (!word.empty()) ++counts[word];
        } else {
            std::string decoded = codec::html_entity_decode(codec::percent_decode(q.text));
            for (unsigned char c : decoded) {
                if (c > 0x20 && c < 0x7f && !codec::is_ascii_alpha(c) && !codec::is_ascii_digit(c))
                    ++counts[std::string(1, static_cast<char>(c))];
            }
        }
    }
    FrequencyReport report{mode, {counts.begin(), counts.end()}};
    std::stable_sort(report.entries.begin(), report.entries.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    return report;
}

// Frequency report file: a header line naming the mode, then `token,count`
// lines with the token percent-encoded.

inline constexpr std::string_view frequency_magic = "# sqlion-frequency v1";

inline void write_frequency_report(std::ostream& out, const FrequencyReport& r) {
    out << frequency_magic << ' ' << (r.mode == FrequencyMode::alphabetic_words ? "words" : "symbols") << '\n';
    for (const auto& [token, count] : r.entries) out << codec::percent_encode(token, " ,") << ',' << count << '\n';
}

inline FrequencyReport read_frequency_report(std::istream& in, std::string_view origin = "frequency report") {
    auto fail = [&](std::size_t line_no, const std::string& why) {
        throw FormatError(std::string(origin) + ":" + std::to_string(line_no) + ": " + why);
    };
    std::string line;
    if (!std::getline(in, line)) fail(1, "empty file");
    FrequencyReport r;
    if (line == std::string(frequency_magic) + " words")
        r.mode = FrequencyMode::alphabetic_words;
    else if (line == std::string(frequency_magic) + " symbols")
        r.mode = FrequencyMode::single_symbols;
    else
        fail(1, "expected '" + std::string(frequency_magic) + " words|symbols'");
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto comma = line.rfind(',');
        if (comma == std::string::npos || comma == 0) fail(line_no, "expected token,count");
        std::uint64_t count = 0;
        auto digits = std::string_view(line).substr(comma + 1);
        auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), count);
        if (ec != std::errc{} || ptr != digits.data() + digits.size() || count == 0) fail(line_no, "bad count");
        r.entries.emplace_back(codec::percent_decode(line.substr(0, comma)), count);
    }
    return r;
}

/// Builds a dictionary from the top-ranked tokens of the two reports, forcing
/// in every mandated pattern. Mandated entries come first in their canonical
/// order, followed by the best-ranked remaining tokens. Non-mandated entries
/// get tier 2 / group C. Throws InvalidArgument when the reports do not
/// supply enough usable tokens.
inline TokenDictionary build_dictionary(const FrequencyReport& words, const FrequencyReport& symbols) {
    if (words.entries.empty() || symbols.entries.empty())
        throw InvalidArgument("build_dictionary: frequency reports must not be empty");

    std::vector<AlphabeticPattern> alpha;
    for (const auto& m : mandated_alphabetic) alpha.push_back({std::string(m.text), m.tier});
    for (const auto& [token, count] : words.entries) {
        if (alpha.size() == alphabetic_pattern_count) break;
        std::string key = alphabetic_key(token);
        if (key.empty() || std::any_of(key.begin(), key.end(), [](char c) { return c >= 'A' && c <= 'Z'; })) continue;
        bool dup = std::any_of(alpha.begin(), alpha.end(),
                               [&](const AlphabeticPattern& p) { return alphabetic_key(p.text) == key; });
        if (!dup) alpha.push_back({token, 2});
    }

    std::vector<SymbolPattern> sym;
    for (const auto& m : mandated_symbols) sym.push_back({std::string(m.text), m.group});
    for (const auto& entry : symbols.entries) {
        const std::string& token = entry.first;
        if (sym.size() == symbol_pattern_count) break;
        SymbolPattern candidate{token, ModifierGroup::C};
        if (token.empty() || std::any_of(token.begin(), token.end(), [](char c) { return codec::is_space(static_cast<unsigned char>(c)); }))
            continue;
        if (std::all_of(token.begin(), token.end(), [](char c) { return codec::is_ascii_alpha(static_cast<unsigned char>(c)); }))
            continue;
        if (matches_alphabetic_projection(candidate)) {
            bool clash = std::any_of(alpha.begin(), alpha.end(),
                                     [&](const AlphabeticPattern& p) { return alphabetic_key(p.text) == token; });
            if (clash) continue;
        }
        bool dup = std::any_of(sym.begin(), sym.end(), [&](const SymbolPattern& p) { return p.text == token; });
        if (!dup) sym.push_back(candidate);
    }

    if (alpha.size() < alphabetic_pattern_count || sym.size() < symbol_pattern_count)
        throw InvalidArgument("build_dictionary: insufficient corpus (" + std::to_string(alpha.size()) +
                              " alphabetic / " + std::to_string(sym.size()) + " symbol candidates)");
    return TokenDictionary(std::move(alpha), std::move(sym));
}

} // namespace sqlion
