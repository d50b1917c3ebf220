#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>

#include "sqlion/collab/clock.hpp"
#include "sqlion/collab/wire.hpp"

namespace sqlion {

// Transport-independent routing core of the notification hub.
//
// Queries from clients go to every analyzer; verdicts from analyzers go to
// every client, and an attack verdict is followed by a block record for the
// query's source address. One inbound record is fully fanned out before the
// next is routed (a single lock covers routing), so per-sender order is kept.
// Nothing is persisted: late joiners only see later traffic.
class Broker {
public:
    using SessionId = std::uint64_t;
    // Delivers one outbound line (no newline). Called under the routing lock;
    // it must queue, not block, and must not call back into the broker.
    using Sink = std::function<void(const std::string&)>;

    struct Stats {
        std::uint64_t queries_routed = 0;
        std::uint64_t verdicts_routed = 0;
        std::uint64_t blocks_issued = 0;
        std::uint64_t protocol_errors = 0;
    };

    explicit Broker(Clock clock = wall_clock_seconds, std::size_t remembered_queries = 65536)
        : clock_(std::move(clock)), remembered_queries_(remembered_queries) {}

    SessionId connect(Sink sink) {
        std::lock_guard lock(mutex_);
        SessionId id = next_id_++;
        sessions_.emplace(id, Session{std::move(sink), std::nullopt, {}});
        return id;
    }

    void disconnect(SessionId id) {
        std::lock_guard lock(mutex_);
        sessions_.erase(id);
    }

    /// Routes one inbound line. Returns false when the sender broke the
    /// protocol; an error record has then been sent and the transport must
    /// close the connection.
    bool receive(SessionId from, std::string_view line) {
        std::lock_guard lock(mutex_);
        auto it = sessions_.find(from);
        if (it == sessions_.end()) return false;
        Session& s = it->second;

        if (line.size() > wire::max_line_bytes) return reject(s, wire::code::too_long, "record exceeds 64 KiB");
        auto msg = wire::decode(line);
        if (!msg) return reject(s, wire::code::bad_message, "malformed record");

        if (!s.role) {
            const auto* hello = std::get_if<wire::Hello>(&*msg);
            if (!hello) return reject(s, wire::code::expected_hello, "first record must be hello");
            s.role = hello->role;
            s.name = hello->name;
            return true;
        }

        if (std::holds_alternative<wire::Hello>(*msg)) return reject(s, wire::code::bad_message, "duplicate hello");

        if (const auto* q = std::get_if<wire::Query>(&*msg)) {
            if (*s.role != wire::Role::client) return reject(s, wire::code::wrong_role, "only clients send queries");
            if (known_queries_.count(q->id)) {
                send_error(s, wire::code::duplicate_id, "query id already routed: " + q->id);
                return true;
            }
            remember(q->id, q->ip);
            ++stats_.queries_routed;
            broadcast(wire::Role::analyzer, std::string(line));
            return true;
        }

        if (const auto* v = std::get_if<wire::VerdictRecord>(&*msg)) {
            if (*s.role != wire::Role::analyzer) return reject(s, wire::code::wrong_role, "only analyzers send verdicts");
            auto known = known_queries_.find(v->id);
            if (known == known_queries_.end() || known->second != v->ip) {
                send_error(s, wire::code::unknown_query, "verdict does not match a routed query: " + v->id);
                return true;
            }
            ++stats_.verdicts_routed;
            broadcast(wire::Role::client, std::string(line));
            if (v->verdict == Verdict::attack) {
                ++stats_.blocks_issued;
                broadcast(wire::Role::client, wire::encode(wire::Block{v->ip, clock_(), v->id}));
            }
            return true;
        }

        if (std::holds_alternative<wire::Error>(*msg)) return true; // peers may report problems; nothing to route
        return reject(s, wire::code::wrong_role, "block records originate at the broker");
    }

    Stats stats() const {
        std::lock_guard lock(mutex_);
        return stats_;
    }

    std::size_t session_count(std::optional<wire::Role> role = std::nullopt) const {
        std::lock_guard lock(mutex_);
        std::size_t n = 0;
        for (const auto& [id, s] : sessions_) {
            if (!role || s.role == role) ++n;
        }
        return n;
    }

private:
    struct Session {
        Sink sink;
        std::optional<wire::Role> role;
        std::string name;
    };

    void send_error(Session& s, std::string_view c, std::string text) {
        ++stats_.protocol_errors;
        s.sink(wire::encode(wire::Error{std::string(c), std::move(text)}));
    }

    bool reject(Session& s, std::string_view c, std::string text) {
        send_error(s, c, std::move(text));
        return false;
    }

    void broadcast(wire::Role role, const std::string& line) {
        // std::map keeps delivery order stable (connection order).
        for (auto& [id, s] : sessions_) {
            if (s.role == role) s.sink(line);
        }
    }

    void remember(const std::string& id, const std::string& ip) {
        known_queries_.emplace(id, ip);
        query_order_.push_back(id);
        while (query_order_.size() > remembered_queries_) {
            known_queries_.erase(query_order_.front());
            query_order_.pop_front();
        }
    }

    mutable std::mutex mutex_;
    Clock clock_;
    std::size_t remembered_queries_;
    SessionId next_id_ = 1;
    std::map<SessionId, Session> sessions_;
    std::unordered_map<std::string, std::string> known_queries_; // id -> source ip
    std::deque<std::string> query_order_;
    Stats stats_;
};

} // namespace sqlion
