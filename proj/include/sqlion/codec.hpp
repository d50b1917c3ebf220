#pragma once

// Byte-level decoders shared by the normalizer and the log parser.
// All of them run exactly one round and leave malformed sequences verbatim.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace sqlion::codec {

inline bool is_ascii_alpha(unsigned char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }
inline bool is_ascii_digit(unsigned char c) { return c >= '0' && c <= '9'; }
inline bool is_space(unsigned char c) {
    return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v';
}
inline char to_lower(unsigned char c) {
    return static_cast<char>((c >= 'A' && c <= 'Z') ? c + ('a' - 'A') : c);
}

inline int hex_value(unsigned char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

/// Decodes `%XX` escapes once. `+` is left alone (it is a payload symbol, not a
/// space, for our purposes).
inline std::string percent_decode(std::string_view in) {
    std::string out;
    out.reserve(in.size());
    for (std::size_t i = 0; i < in.size(); ++i) {
        if (in[i] == '%' && i + 2 < in.size()) {
            int hi = hex_value(static_cast<unsigned char>(in[i + 1]));
            int lo = hex_value(static_cast<unsigned char>(in[i + 2]));
            if (hi >= 0 && lo >= 0) {
                out.push_back(static_cast<char>(hi * 16 + lo));
                i += 2;
                continue;
            }
        }
        out.push_back(in[i]);
    }
    return out;
}

/// Percent-encodes `%`, control bytes, DEL and every byte listed in `extra`.
/// Used for the line-oriented corpus and dictionary files.
inline std::string percent_encode(std::string_view in, std::string_view extra = {}) {
    static constexpr char digits[] = "0123456789ABCDEF";
    std::string out;
    out.reserve(in.size());
    for (unsigned char c : in) {
        if (c == '%' || c < 0x20 || c == 0x7f || extra.find(static_cast<char>(c)) != std::string_view::npos) {
            out.push_back('%');
            out.push_back(digits[c >> 4]);
            out.push_back(digits[c & 0xf]);
        } else {
            out.push_back(static_cast<char>(c));
        }
    }
    return out;
}

inline void append_utf8(std::string& out, char32_t cp) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

namespace detail {

struct NamedEntity {
    std::string_view name;
    char32_t codepoint;
};

// HTML named references for the characters injection payloads actually use.
inline constexpr std::array<NamedEntity, 24> named_entities{{
    {"amp", U'&'},    {"lt", U'<'},     {"gt", U'>'},     {"quot", U'"'},
    {"apos", U'\''},  {"nbsp", 0xA0},   {"sol", U'/'},    {"bsol", U'\\'},
    {"num", U'#'},    {"percnt", U'%'}, {"semi", U';'},   {"colon", U':'},
    {"lpar", U'('},   {"rpar", U')'},   {"comma", U','},  {"period", U'.'},
    {"equals", U'='}, {"plus", U'+'},   {"ast", U'*'},    {"midast", U'*'},
    {"excl", U'!'},   {"quest", U'?'},  {"dollar", U'$'}, {"hyphen", U'-'},
}};

inline std::optional<char32_t> lookup_entity(std::string_view name) {
    for (const auto& e : named_entities) {
        if (e.name == name) return e.codepoint;
    }
    return std::nullopt;
}

} // namespace detail

/// Decodes `&name;`, `&#NNN;` and `&#xHH;` once. Unknown names, missing
/// semicolons and out-of-range code points are copied through unchanged.
inline std::string html_entity_decode(std::string_view in) {
    std::string out;
    out.reserve(in.size());
    std::size_t i = 0;
    while (i < in.size()) {
        if (in[i] != '&') {
            out.push_back(in[i++]);
            continue;
        }
        std::size_t semi = in.find(';', i + 1);
        // Entity bodies are short; anything longer is not an entity.
        if (semi == std::string_view::npos || semi - i - 1 == 0 || semi - i - 1 > 10) {
            out.push_back(in[i++]);
            continue;
        }
        std::string_view body = in.substr(i + 1, semi - i - 1);
        std::optional<char32_t> cp;
        if (body[0] == '#') {
            std::string_view num = body.substr(1);
            bool hex = !num.empty() && (num[0] == 'x' || num[0] == 'X');
            if (hex) num.remove_prefix(1);
            if (!num.empty()) {
                std::uint32_t value = 0;
                bool ok = true;
                for (char ch : num) {
                    int d = hex ? hex_value(static_cast<unsigned char>(ch))
                                : (is_ascii_digit(static_cast<unsigned char>(ch)) ? ch - '0' : -1);
                    if (d < 0 || value > 0x10FFFF) {
                        ok = false;
                        break;
                    }
                    value = value * (hex ? 16 : 10) + static_cast<std::uint32_t>(d);
                }
                if (ok && value != 0 && value <= 0x10FFFF && !(value >= 0xD800 && value <= 0xDFFF))
                    cp = static_cast<char32_t>(value);
            }
        } else {
            cp = detail::lookup_entity(body);
        }
        if (!cp) {
            out.push_back(in[i++]);
            continue;
        }
        append_utf8(out, *cp);
        i = semi + 1;
    }
    return out;
}

/// True when `s` is well-formed UTF-8 (no overlongs, no surrogates).
inline bool is_valid_utf8(std::string_view s) {
    std::size_t i = 0;
    while (i < s.size()) {
        auto c = static_cast<unsigned char>(s[i]);
        std::size_t len = 0;
        char32_t cp = 0;
        if (c < 0x80) {
            ++i;
            continue;
        } else if ((c & 0xE0) == 0xC0) {
            len = 2;
            cp = c & 0x1F;
        } else if ((c & 0xF0) == 0xE0) {
            len = 3;
            cp = c & 0x0F;
        } else if ((c & 0xF8) == 0xF0) {
            len = 4;
            cp = c & 0x07;
        } else {
            return false;
        }
        if (i + len > s.size()) return false;
        for (std::size_t k = 1; k < len; ++k) {
            auto cc = static_cast<unsigned char>(s[i + k]);
            if ((cc & 0xC0) != 0x80) return false;
            cp = (cp << 6) | (cc & 0x3F);
        }
        static constexpr char32_t min_for_len[] = {0, 0, 0x80, 0x800, 0x10000};
        if (cp < min_for_len[len] || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) return false;
        i += len;
    }
    return true;
}

} // namespace sqlion::codec
