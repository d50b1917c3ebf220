#pragma once

#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "sqlion/codec.hpp"
#include "sqlion/dataset/default_templates.hpp"
#include "sqlion/error.hpp"
#include "sqlion/normalize.hpp"
#include "sqlion/rng.hpp"

namespace sqlion {

enum class CorpusKind { malicious, legitimate };

inline std::string_view to_string(CorpusKind k) { return k == CorpusKind::malicious ? "malicious" : "legitimate"; }

struct CorpusSpec {
    CorpusKind kind = CorpusKind::malicious;
    std::size_t count = 1;
    std::uint64_t seed = 1;
    bool dedupe = false;
};

// Template expansion material. Templates use the placeholders {num}, {word},
// {hex} and {sp} (a space the generator may obfuscate).
struct CorpusGrammar {
    std::vector<std::string> templates;
    std::vector<std::string> words;
    std::vector<std::string> spaces; // weighted by repetition
    std::uint64_t max_number = 9999;
    bool mix_case = false;
};

inline std::vector<std::string> parse_templates(std::string_view text) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto nl = text.find('\n', pos);
        auto line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (!line.empty()) out.emplace_back(line);
        if (nl == std::string_view::npos) break;
        pos = nl + 1;
    }
    return out;
}

inline std::vector<std::string> read_templates(std::istream& in) {
    std::string all((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    auto t = parse_templates(all);
    if (t.empty()) throw FormatError("template file contains no templates");
    return t;
}

inline CorpusGrammar default_grammar(CorpusKind kind) {
    CorpusGrammar g;
    if (kind == CorpusKind::malicious) {
        g.templates = parse_templates(templates::malicious);
        g.words = {"users", "admin", "passwd", "password", "username", "login", "accounts", "customers",
                   "orders", "products", "secret", "tbl", "members", "session", "credit", "email",
                   "name", "pass", "uid", "mysql", "version", "data", "hash", "token"};
        g.spaces = {" ", " ", " ", " ", " ", " ", "/**/", "/**/", "+", "%20", "\t", "%0a"};
        g.mix_case = true;
    } else {
        g.templates = parse_templates(templates::legitimate);
        // tests/oracles/check_legit_grammar.py verifies no expansion of the
        // legitimate templates with these words reaches a tier-3 pattern.
        g.words = {"blue", "shoes", "pink", "summer", "news", "blog", "post", "film", "music", "travel",
                   "guide", "cooking", "chicken", "bread", "coffee", "bagel", "book", "donut", "photo", "video",
                   "city", "beach", "hotel", "game", "team", "jobs", "home", "garden", "kitchen", "wine",
                   "muffin", "soup", "cheese", "bike", "hiking", "mountain", "canyon", "lake", "snow", "winter",
                   "spring", "june", "july", "monday", "weekend", "tips", "help", "login", "profile", "search",
                   "event", "ticket", "museum", "movie", "comedy", "kids", "puppy", "kitten", "phone", "laptop",
                   "cable", "dinner", "lunch", "menu", "deals", "green", "light", "night", "quiet", "sunny"};
        g.spaces = {" ", " ", " ", " ", " ", " ", "+", "+", "+", "%20"};
        g.max_number = 500;
    }
    return g;
}

namespace detail {

inline std::string random_hex(Rng& rng) {
    static constexpr char digits[] = "0123456789abcdef";
    std::string h = "0x";
    auto n = 4 + 2 * rng.below(4);
    for (std::uint64_t i = 0; i < n; ++i) h.push_back(digits[rng.below(16)]);
    return h;
}

inline std::string expand_template(std::string_view tpl, const CorpusGrammar& g, Rng& rng) {
    std::string out;
    std::size_t i = 0;
    while (i < tpl.size()) {
        if (tpl[i] == '{') {
            auto close = tpl.find('}', i);
            if (close != std::string_view::npos) {
                auto name = tpl.substr(i + 1, close - i - 1);
                bool known = true;
                if (name == "num")
                    out += std::to_string(1 + rng.below(g.max_number));
                else if (name == "word")
                    out += rng.pick(g.words);
                else if (name == "hex")
                    out += random_hex(rng);
                else if (name == "sp")
                    out += rng.pick(g.spaces);
                else
                    known = false;
                if (known) {
                    i = close + 1;
                    continue;
                }
            }
        }
        out.push_back(tpl[i++]);
    }
    return out;
}

// Case obfuscation: a quarter of payloads fully lowercased, a quarter with
// every letter's case flipped at random.
inline void obfuscate_case(std::string& s, Rng& rng) {
    auto mode = rng.below(4);
    if (mode == 0) {
        for (auto& c : s) c = codec::to_lower(static_cast<unsigned char>(c));
    } else if (mode == 1) {
        for (auto& c : s) {
            if (codec::is_ascii_alpha(static_cast<unsigned char>(c)) && rng.chance(1, 2)) c = static_cast<char>(c ^ 0x20);
        }
    }
}

} // namespace detail

/// Seeded stand-in for a captured corpus; a pure function of (spec, grammar).
inline std::vector<RawQuery> generate_corpus(const CorpusSpec& spec, const CorpusGrammar& grammar) {
    if (spec.count == 0) throw InvalidArgument("generate_corpus: count must be positive");
    if (grammar.templates.empty() || grammar.words.empty() || grammar.spaces.empty() || grammar.max_number == 0)
        throw InvalidArgument("generate_corpus: incomplete grammar");

    Rng rng(spec.seed);
    std::vector<RawQuery> out;
    out.reserve(spec.count);
    std::unordered_set<std::string> seen;
    const std::string source(to_string(spec.kind));
    // Dedupe can exhaust a small grammar; give up after a generous budget.
    std::size_t attempts = 0;
    const std::size_t max_attempts = spec.count * 50 + 1000;
    while (out.size() < spec.count) {
        if (++attempts > max_attempts)
            throw InvalidArgument("generate_corpus: grammar cannot produce " + std::to_string(spec.count) + " distinct queries");
        std::string q = detail::expand_template(rng.pick(grammar.templates), grammar, rng);
        if (grammar.mix_case) detail::obfuscate_case(q, rng);
        if (spec.dedupe && !seen.insert(q).second) continue;
        out.push_back({std::move(q), source});
    }
    return out;
}

inline std::vector<RawQuery> generate_corpus(const CorpusSpec& spec) {
    return generate_corpus(spec, default_grammar(spec.kind));
}

// Corpus file: one query per line, with '%', control bytes and DEL
// percent-encoded so any byte string fits on a line.

inline void write_corpus(std::ostream& out, const std::vector<RawQuery>& corpus) {
    for (const auto& q : corpus) out << codec::percent_encode(q.text) << '\n';
}

inline std::vector<RawQuery> read_corpus(std::istream& in, std::string_view source) {
    std::vector<RawQuery> out;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        out.push_back({codec::percent_decode(line), std::string(source)});
    }
    return out;
}

} // namespace sqlion
