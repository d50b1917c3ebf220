#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <istream>
#include <memory>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "sqlion/codec.hpp"
#include "sqlion/error.hpp"

namespace sqlion {

// Symbol modifier groups of the risk labeler. A raises the level below 4,
// B below 3, C below 2.
enum class ModifierGroup { A, B, C };

inline char to_char(ModifierGroup g) { return g == ModifierGroup::A ? 'A' : g == ModifierGroup::B ? 'B' : 'C'; }

struct AlphabeticPattern {
    std::string text; // as written, e.g. "union select"
    int tier = 2;     // base level contributed when present: 2, 3 or 4

    friend bool operator==(const AlphabeticPattern&, const AlphabeticPattern&) = default;
};

struct SymbolPattern {
    std::string text; // literal symbols, or digit_class_token
    ModifierGroup group = ModifierGroup::C;

    friend bool operator==(const SymbolPattern&, const SymbolPattern&) = default;
};

/// Spelling of the digit-class pattern (one maximal run of digits).
inline constexpr std::string_view digit_class_token = "\\d+";

inline constexpr std::size_t alphabetic_pattern_count = 30;
inline constexpr std::size_t symbol_pattern_count = 20;
inline constexpr std::size_t feature_count = alphabetic_pattern_count + symbol_pattern_count;

/// Key an alphabetic pattern is matched with: whitespace removed, so
/// "union select" matches "unionselect" in the alphabetic projection.
inline std::string alphabetic_key(std::string_view text) {
    std::string key;
    for (unsigned char c : text) {
        if (!codec::is_space(c)) key.push_back(static_cast<char>(c));
    }
    return key;
}

/// Symbol patterns carrying ASCII letters (the hex prefixes `\x` and `0x`)
/// cannot be seen in the symbolic projection, which has letters removed; they
/// are matched against the alphabetic projection instead.
inline bool matches_alphabetic_projection(const SymbolPattern& p) {
    if (p.text == digit_class_token) return false;
    return std::any_of(p.text.begin(), p.text.end(),
                       [](char c) { return codec::is_ascii_alpha(static_cast<unsigned char>(c)); });
}

struct MandatedAlphabetic {
    std::string_view text;
    int tier;
};

struct MandatedSymbol {
    std::string_view text;
    ModifierGroup group;
};

// Patterns the risk rules name explicitly; every dictionary must carry them
// with exactly these tiers and groups.
inline constexpr std::array<MandatedAlphabetic, 11> mandated_alphabetic{{
    {"union select", 4},
    {"all", 3}, {"and", 3}, {"chr", 3}, {"=", 3}, {"where", 3}, {"or", 3},
    {"select", 2}, {"as", 2}, {"from", 2}, {"like", 2},
}};

inline constexpr std::array<MandatedSymbol, 16> mandated_symbols{{
    {"\\x", ModifierGroup::A}, {"0x", ModifierGroup::A}, {"'", ModifierGroup::A}, {"\"", ModifierGroup::A},
    {".", ModifierGroup::B}, {"<", ModifierGroup::B}, {">", ModifierGroup::B},
    {"(", ModifierGroup::B}, {")", ModifierGroup::B}, {digit_class_token, ModifierGroup::B},
    {"/*", ModifierGroup::C}, {"*/", ModifierGroup::C}, {"%", ModifierGroup::C},
    {"#", ModifierGroup::C}, {"--", ModifierGroup::C}, {";", ModifierGroup::C},
}};

/// Lists every invariant the pattern lists break; empty means valid.
inline std::vector<std::string> dictionary_violations(const std::vector<AlphabeticPattern>& alphabetic,
                                                      const std::vector<SymbolPattern>& symbols) {
    std::vector<std::string> errs;
    if (alphabetic.size() != alphabetic_pattern_count)
        errs.push_back("expected 30 alphabetic patterns, got " + std::to_string(alphabetic.size()));
    if (symbols.size() != symbol_pattern_count)
        errs.push_back("expected 20 symbol patterns, got " + std::to_string(symbols.size()));

    std::vector<std::string> seen;
    for (const auto& p : alphabetic) {
        std::string key = alphabetic_key(p.text);
        if (key.empty()) errs.push_back("empty alphabetic pattern");
        if (std::any_of(key.begin(), key.end(), [](char c) { return c >= 'A' && c <= 'Z'; }))
            errs.push_back("alphabetic pattern not lowercase: " + p.text);
        if (p.tier < 2 || p.tier > 4) errs.push_back("tier out of range for " + p.text);
        if (std::find(seen.begin(), seen.end(), key) != seen.end()) errs.push_back("duplicate alphabetic pattern: " + p.text);
        seen.push_back(key);
    }
    seen.clear();
    for (const auto& p : symbols) {
        if (p.text.empty()) errs.push_back("empty symbol pattern");
        bool all_alpha = !p.text.empty() && std::all_of(p.text.begin(), p.text.end(), [](char c) {
            return codec::is_ascii_alpha(static_cast<unsigned char>(c));
        });
        if (all_alpha) errs.push_back("symbol pattern is purely alphabetic: " + p.text);
        if (std::any_of(p.text.begin(), p.text.end(), [](char c) { return codec::is_space(static_cast<unsigned char>(c)); }))
            errs.push_back("symbol pattern contains whitespace");
        if (std::find(seen.begin(), seen.end(), p.text) != seen.end()) errs.push_back("duplicate symbol pattern: " + p.text);
        seen.push_back(p.text);
        if (matches_alphabetic_projection(p)) {
            bool clash = std::any_of(alphabetic.begin(), alphabetic.end(),
                                     [&](const AlphabeticPattern& a) { return alphabetic_key(a.text) == p.text; });
            if (clash) errs.push_back("symbol pattern " + p.text + " collides with an alphabetic pattern");
        }
    }

    for (const auto& m : mandated_alphabetic) {
        auto it = std::find_if(alphabetic.begin(), alphabetic.end(),
                               [&](const AlphabeticPattern& p) { return alphabetic_key(p.text) == alphabetic_key(m.text); });
        if (it == alphabetic.end())
            errs.push_back("missing mandated alphabetic pattern: " + std::string(m.text));
        else if (it->tier != m.tier)
            errs.push_back("mandated pattern " + std::string(m.text) + " must have tier " + std::to_string(m.tier));
    }
    for (const auto& m : mandated_symbols) {
        auto it = std::find_if(symbols.begin(), symbols.end(), [&](const SymbolPattern& p) { return p.text == m.text; });
        if (it == symbols.end())
            errs.push_back("missing mandated symbol pattern: " + std::string(m.text));
        else if (it->group != m.group)
            errs.push_back("mandated symbol " + std::string(m.text) + " must be in group " + to_char(m.group));
    }
    return errs;
}

namespace detail {

// Byte trie over the literal patterns of one projection.
class PatternTrie {
public:
    PatternTrie() : nodes_(1) {}

    void insert(std::string_view key, int feature_index) {
        std::size_t n = 0;
        for (unsigned char c : key) {
            int next = nodes_[n].child[c];
            if (next == 0) {
                next = static_cast<int>(nodes_.size());
                nodes_[n].child[c] = next;
                nodes_.emplace_back();
            }
            n = static_cast<std::size_t>(next);
        }
        nodes_[n].feature = feature_index;
    }

    struct Match {
        int feature = -1;
        std::size_t length = 0;
    };

    // Longest pattern starting at `pos`.
    Match longest_at(std::string_view s, std::size_t pos) const {
        Match best;
        std::size_t n = 0;
        for (std::size_t i = pos; i < s.size(); ++i) {
            int next = nodes_[n].child[static_cast<unsigned char>(s[i])];
            if (next == 0) break;
            n = static_cast<std::size_t>(next);
            if (nodes_[n].feature >= 0) best = {nodes_[n].feature, i - pos + 1};
        }
        return best;
    }

private:
    struct Node {
        std::array<int, 256> child{};
        int feature = -1;
    };
    std::vector<Node> nodes_;
};

} // namespace detail

/// The 30 alphabetic + 20 symbol patterns, their tiers and modifier groups.
/// Immutable once built; share freely across threads.
class TokenDictionary {
public:
    TokenDictionary(std::vector<AlphabeticPattern> alphabetic, std::vector<SymbolPattern> symbols)
        : alphabetic_(std::move(alphabetic)), symbols_(std::move(symbols)) {
        auto errs = dictionary_violations(alphabetic_, symbols_);
        if (!errs.empty()) {
            std::string msg = "invalid token dictionary:";
            for (const auto& e : errs) msg += "\n  " + e;
            throw FormatError(msg);
        }
        for (std::size_t i = 0; i < alphabetic_.size(); ++i)
            l1_trie_.insert(alphabetic_key(alphabetic_[i].text), static_cast<int>(i));
        for (std::size_t i = 0; i < symbols_.size(); ++i) {
            int index = static_cast<int>(alphabetic_pattern_count + i);
            const auto& p = symbols_[i];
            if (p.text == digit_class_token)
                digit_class_index_ = index;
            else if (matches_alphabetic_projection(p))
                l1_trie_.insert(p.text, index);
            else
                l2_trie_.insert(p.text, index);
        }
    }

    const std::vector<AlphabeticPattern>& alphabetic() const { return alphabetic_; }
    const std::vector<SymbolPattern>& symbols() const { return symbols_; }

    /// Display name of a feature column (0-29 alphabetic, 30-49 symbol).
    const std::string& feature_name(std::size_t index) const {
        return index < alphabetic_pattern_count ? alphabetic_[index].text
                                                : symbols_[index - alphabetic_pattern_count].text;
    }

    /// Feature index of a pattern, by display text; -1 when absent. Alphabetic
    /// patterns are searched first.
    int index_of(std::string_view text) const {
        for (std::size_t i = 0; i < alphabetic_.size(); ++i)
            if (alphabetic_key(alphabetic_[i].text) == alphabetic_key(text)) return static_cast<int>(i);
        for (std::size_t i = 0; i < symbols_.size(); ++i)
            if (symbols_[i].text == text) return static_cast<int>(alphabetic_pattern_count + i);
        return -1;
    }

    int symbol_index_of(std::string_view text) const {
        for (std::size_t i = 0; i < symbols_.size(); ++i)
            if (symbols_[i].text == text) return static_cast<int>(alphabetic_pattern_count + i);
        return -1;
    }

    const detail::PatternTrie& l1_trie() const { return l1_trie_; }
    const detail::PatternTrie& l2_trie() const { return l2_trie_; }
    int digit_class_index() const { return digit_class_index_; }

    friend bool operator==(const TokenDictionary& a, const TokenDictionary& b) {
        return a.alphabetic_ == b.alphabetic_ && a.symbols_ == b.symbols_;
    }

private:
    std::vector<AlphabeticPattern> alphabetic_;
    std::vector<SymbolPattern> symbols_;
    detail::PatternTrie l1_trie_;
    detail::PatternTrie l2_trie_;
    int digit_class_index_ = -1;
};

/// The shipped dictionary: the mandated patterns plus common attack keywords
/// and punctuation. Non-mandated entries sit at tier 2 / group C.
inline const TokenDictionary& default_dictionary() {
    static const TokenDictionary dict = [] {
        std::vector<AlphabeticPattern> alpha{
            {"union select", 4}, {"all", 3}, {"and", 3}, {"chr", 3}, {"=", 3}, {"where", 3}, {"or", 3},
            {"select", 2}, {"as", 2}, {"from", 2}, {"like", 2},
            {"union", 2}, {"char", 2}, {"waitfor", 2},
            {"insert", 2}, {"update", 2}, {"delete", 2}, {"drop", 2}, {"table", 2},
            {"order by", 2}, {"group by", 2}, {"having", 2}, {"concat", 2}, {"sleep", 2},
            {"benchmark", 2}, {"cast", 2}, {"null", 2}, {"exec", 2}, {"declare", 2}, {"information", 2},
        };
        using G = ModifierGroup;
        std::vector<SymbolPattern> sym{
            {"/*", G::C}, {"*/", G::C}, {"--", G::C}, {"#", G::C}, {"%", G::C}, {";", G::C},
            {"'", G::A}, {"\"", G::A}, {"<", G::B}, {">", G::B}, {"(", G::B}, {")", G::B},
            {"=", G::C}, {".", G::B}, {",", G::C}, {"+", G::C}, {"*", G::C},
            {"\\x", G::A}, {"0x", G::A}, {std::string(digit_class_token), G::B},
        };
        return TokenDictionary(std::move(alpha), std::move(sym));
    }();
    return dict;
}

// Dictionary file: one `<kind>,<pattern>,<tier-or-group>` line per entry,
// kind A or S, pattern percent-encoded, A-lines before S-lines.

inline void write_dictionary(std::ostream& out, const TokenDictionary& dict) {
    for (const auto& p : dict.alphabetic())
        out << "A," << codec::percent_encode(p.text, " ,") << ',' << p.tier << '\n';
    for (const auto& p : dict.symbols())
        out << "S," << codec::percent_encode(p.text, " ,") << ',' << to_char(p.group) << '\n';
}

inline TokenDictionary read_dictionary(std::istream& in, std::string_view origin = "dictionary") {
    std::vector<AlphabeticPattern> alpha;
    std::vector<SymbolPattern> sym;
    std::string line;
    std::size_t line_no = 0;
    auto fail = [&](const std::string& why) {
        throw FormatError(std::string(origin) + ":" + std::to_string(line_no) + ": " + why);
    };
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto first = line.find(',');
        auto last = line.rfind(',');
        if (first == std::string::npos || first == last) fail("expected <kind>,<pattern>,<tier-or-group>");
        std::string kind = line.substr(0, first);
        std::string pattern = codec::percent_decode(line.substr(first + 1, last - first - 1));
        std::string tag = line.substr(last + 1);
        if (kind == "A") {
            if (tag != "2" && tag != "3" && tag != "4") fail("alphabetic tier must be 2, 3 or 4");
            if (!sym.empty()) fail("alphabetic entries must precede symbol entries");
            alpha.push_back({pattern, tag[0] - '0'});
        } else if (kind == "S") {
            if (tag != "A" && tag != "B" && tag != "C") fail("symbol group must be A, B or C");
            sym.push_back({pattern, tag == "A" ? ModifierGroup::A : tag == "B" ? ModifierGroup::B : ModifierGroup::C});
        } else {
            fail("unknown entry kind '" + kind + "'");
        }
    }
    try {
        return TokenDictionary(std::move(alpha), std::move(sym));
    } catch (const FormatError& e) {
        throw FormatError(std::string(origin) + ": " + e.what());
    }
}

} // namespace sqlion
