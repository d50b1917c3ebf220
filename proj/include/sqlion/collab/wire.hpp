#pragma once

// Newline-delimited records exchanged between agents, analyzers and the
// broker. Each record is one flat JSON object with a "type" field.

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <variant>

#include <json.hpp>

#include "sqlion/labeler.hpp"
#include "sqlion/rng.hpp"

namespace sqlion::wire {

inline constexpr std::size_t max_line_bytes = 64 * 1024;

// Error codes carried in error records.
namespace code {
inline constexpr std::string_view bad_message = "bad-message";
inline constexpr std::string_view too_long = "too-long";
inline constexpr std::string_view expected_hello = "expected-hello";
inline constexpr std::string_view wrong_role = "wrong-role";
inline constexpr std::string_view unknown_query = "unknown-query";
inline constexpr std::string_view duplicate_id = "duplicate-id";
} // namespace code

enum class Role { client, analyzer };

inline std::string_view to_string(Role r) { return r == Role::client ? "client" : "analyzer"; }

struct Hello {
    Role role = Role::client;
    std::string name;
    friend bool operator==(const Hello&, const Hello&) = default;
};

struct Query {
    std::string id;
    std::string client;
    std::string ip;
    std::int64_t timestamp = 0;
    std::string query;
    friend bool operator==(const Query&, const Query&) = default;
};

struct VerdictRecord {
    std::string id;
    int level = 1;
    Verdict verdict = Verdict::benign;
    std::string model; // "nb" or "tree"
    double confidence = 0.0;
    std::string ip;
    friend bool operator==(const VerdictRecord&, const VerdictRecord&) = default;
};

struct Block {
    std::string ip;
    std::int64_t issued_at = 0;
    std::string reason; // id of the query that triggered the block
    friend bool operator==(const Block&, const Block&) = default;
};

struct Error {
    std::string code;
    std::string text;
    friend bool operator==(const Error&, const Error&) = default;
};

using Message = std::variant<Hello, Query, VerdictRecord, Block, Error>;

/// Encodes a record as a single line, without the trailing newline. Invalid
/// UTF-8 in text fields is replaced with U+FFFD.
inline std::string encode(const Message& msg) {
    nlohmann::ordered_json j;
    std::visit(
        [&](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, Hello>) {
                j["type"] = "hello";
                j["role"] = to_string(m.role);
                j["name"] = m.name;
            } else if constexpr (std::is_same_v<T, Query>) {
                j["type"] = "query";
                j["id"] = m.id;
                j["client"] = m.client;
                j["ip"] = m.ip;
                j["ts"] = m.timestamp;
                j["query"] = m.query;
            } else if constexpr (std::is_same_v<T, VerdictRecord>) {
                j["type"] = "verdict";
                j["id"] = m.id;
                j["level"] = m.level;
                j["verdict"] = sqlion::to_string(m.verdict);
                j["model"] = m.model;
                j["confidence"] = m.confidence;
                j["ip"] = m.ip;
            } else if constexpr (std::is_same_v<T, Block>) {
                j["type"] = "block";
                j["ip"] = m.ip;
                j["issued_at"] = m.issued_at;
                j["reason"] = m.reason;
            } else {
                j["type"] = "error";
                j["code"] = m.code;
                j["text"] = m.text;
            }
        },
        msg);
    return j.dump(-1, ' ', false, nlohmann::ordered_json::error_handler_t::replace);
}

namespace detail {

class FieldReader {
public:
    explicit FieldReader(const nlohmann::json& j) : j_(j) {}

    std::optional<std::string> str(const char* key) const {
        auto it = j_.find(key);
        if (it == j_.end() || !it->is_string()) return std::nullopt;
        return it->get<std::string>();
    }

    std::optional<std::int64_t> integer(const char* key) const {
        auto it = j_.find(key);
        if (it == j_.end() || !it->is_number_integer()) return std::nullopt;
        return it->get<std::int64_t>();
    }

    std::optional<double> number(const char* key) const {
        auto it = j_.find(key);
        if (it == j_.end() || !it->is_number()) return std::nullopt;
        return it->get<double>();
    }

private:
    const nlohmann::json& j_;
};

} // namespace detail

/// Parses one record; nullopt for anything that is not a well-formed flat
/// record of a known type.
inline std::optional<Message> decode(std::string_view line) {
    auto j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) return std::nullopt;
    for (const auto& [key, value] : j.items()) {
        if (value.is_object() || value.is_array()) return std::nullopt;
    }
    detail::FieldReader f(j);
    auto type = f.str("type");
    if (!type) return std::nullopt;

    if (*type == "hello") {
        auto role = f.str("role");
        auto name = f.str("name");
        if (!role || !name || (*role != "client" && *role != "analyzer")) return std::nullopt;
        return Hello{*role == "client" ? Role::client : Role::analyzer, *name};
    }
    if (*type == "query") {
        auto id = f.str("id");
        auto client = f.str("client");
        auto ip = f.str("ip");
        auto ts = f.integer("ts");
        auto query = f.str("query");
        if (!id || id->empty() || !client || !ip || !ts || !query) return std::nullopt;
        return Query{*id, *client, *ip, *ts, *query};
    }
    if (*type == "verdict") {
        auto id = f.str("id");
        auto level = f.integer("level");
        auto word = f.str("verdict");
        auto model = f.str("model");
        auto confidence = f.number("confidence");
        auto ip = f.str("ip");
        if (!id || !level || !word || !model || !confidence || !ip) return std::nullopt;
        auto verdict = parse_verdict(*word);
        if (!verdict || *level < 1 || *level > 4 || (*model != "nb" && *model != "tree")) return std::nullopt;
        if (!(*confidence >= 0.0 && *confidence <= 1.0)) return std::nullopt;
        return VerdictRecord{*id, static_cast<int>(*level), *verdict, *model, *confidence, *ip};
    }
    if (*type == "block") {
        auto ip = f.str("ip");
        auto issued = f.integer("issued_at");
        auto reason = f.str("reason");
        if (!ip || ip->empty() || !issued || !reason) return std::nullopt;
        return Block{*ip, *issued, *reason};
    }
    if (*type == "error") {
        auto c = f.str("code");
        auto text = f.str("text");
        if (!c || !text) return std::nullopt;
        return Error{*c, *text};
    }
    return std::nullopt;
}

/// Random (version 4) UUIDs for query ids.
class UuidGenerator {
public:
    UuidGenerator() : rng_(std::random_device{}() ^ (static_cast<std::uint64_t>(std::random_device{}()) << 32)) {}
    explicit UuidGenerator(std::uint64_t seed) : rng_(seed) {}

    std::string next() {
        std::uint64_t hi = rng_.next();
        std::uint64_t lo = rng_.next();
        hi = (hi & 0xFFFFFFFFFFFF0FFFull) | 0x0000000000004000ull;
        lo = (lo & 0x3FFFFFFFFFFFFFFFull) | 0x8000000000000000ull;
        static constexpr char digits[] = "0123456789abcdef";
        std::string s;
        s.reserve(36);
        for (int i = 0; i < 32; ++i) {
            std::uint64_t word = i < 16 ? hi : lo;
            int shift = 60 - 4 * (i % 16);
            s.push_back(digits[(word >> shift) & 0xF]);
            if (i == 7 || i == 11 || i == 15 || i == 19) s.push_back('-');
        }
        return s;
    }

private:
    Rng rng_;
};

} // namespace sqlion::wire
