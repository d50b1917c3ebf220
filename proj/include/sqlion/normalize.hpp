#pragma once

#include <string>
#include <string_view>

#include "sqlion/codec.hpp"

namespace sqlion {

// One request's query text: everything after `?` plus form bodies, already
// percent-decoded once by the log parser. Arbitrary bytes are allowed.
struct RawQuery {
    std::string text;
    std::string source; // corpus or log file tag

    friend bool operator==(const RawQuery&, const RawQuery&) = default;
};

// The two projections the feature extractor works on.
//
//   l1 (alphabetic form): lowercase, no whitespace, `/*...*/` spans removed.
//   l2 (symbolic form):   decoded text with every ASCII letter and whitespace
//                         removed; comment markers survive here.
struct NormalizedQuery {
    std::string l1;
    std::string l2;

    friend bool operator==(const NormalizedQuery&, const NormalizedQuery&) = default;
};

namespace detail {

// Lowercases, drops whitespace and strips inline comments in one pass.
//
// Whitespace is invisible to comment detection as well, and a comment opener
// is recognised against the already-emitted output, so `/ *x* /` and
// `//**/*x*/` both collapse completely. The output therefore never contains
// `/*`, which is what makes the projection idempotent. An unterminated `/*`
// swallows the rest of the input.
inline std::string alphabetic_projection(std::string_view raw) {
    std::string out;
    out.reserve(raw.size());
    bool in_comment = false;
    char prev_in_comment = '\0';
    for (unsigned char uc : raw) {
        if (codec::is_space(uc)) continue;
        char c = codec::to_lower(uc);
        if (in_comment) {
            if (prev_in_comment == '*' && c == '/') {
                in_comment = false;
                prev_in_comment = '\0';
            } else {
                prev_in_comment = c;
            }
            continue;
        }
        if (c == '*' && !out.empty() && out.back() == '/') {
            out.pop_back();
            in_comment = true;
            prev_in_comment = '\0';
            continue;
        }
        out.push_back(c);
    }
    return out;
}

inline std::string symbolic_projection(std::string_view raw) {
    std::string decoded = codec::html_entity_decode(codec::percent_decode(raw));
    std::string out;
    out.reserve(decoded.size());
    for (unsigned char c : decoded) {
        if (codec::is_ascii_alpha(c) || codec::is_space(c)) continue;
        out.push_back(static_cast<char>(c));
    }
    return out;
}

} // namespace detail

inline NormalizedQuery normalize(std::string_view raw) {
    return {detail::alphabetic_projection(raw), detail::symbolic_projection(raw)};
}

inline NormalizedQuery normalize(const RawQuery& raw) { return normalize(raw.text); }

/// True iff re-normalizing `q.l1` leaves it unchanged.
inline bool is_normal_form(const NormalizedQuery& q) {
    return detail::alphabetic_projection(q.l1) == q.l1;
}

} // namespace sqlion
