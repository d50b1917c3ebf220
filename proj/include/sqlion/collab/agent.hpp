#pragma once

#include <atomic>
#include <cstdint>
#include <deque>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>

#include "sqlion/collab/blocklist.hpp"
#include "sqlion/collab/clock.hpp"
#include "sqlion/collab/wire.hpp"
#include "sqlion/dataset/access_log.hpp"

namespace sqlion {

struct AgentOptions {
    std::string name = "agent";
    // Blocks caused by verdicts below this level are ignored.
    int block_threshold = default_block_threshold;
    std::optional<std::int64_t> block_ttl_seconds;
};

// Client side of the network: turns access-log records into query records,
// keeps the blocklist current from broker traffic and answers is_blocked for
// the fronting web layer. Transport-free; see collab/tcp.hpp for the socket
// runner.
class Agent {
public:
    struct Counters {
        std::uint64_t emitted = 0;
        std::uint64_t dropped_blocked = 0;
        std::uint64_t malformed = 0;
        std::uint64_t oversized = 0;
        std::uint64_t verdicts = 0;
        std::uint64_t blocks_applied = 0;
        std::uint64_t blocks_ignored = 0;
    };

    explicit Agent(AgentOptions options, wire::UuidGenerator ids = {}, Clock clock = wall_clock_seconds)
        : options_(std::move(options)), ids_(std::move(ids)), clock_(std::move(clock)),
          blocklist_(options_.block_ttl_seconds) {
        if (options_.block_threshold < 2 || options_.block_threshold > 4)
            throw InvalidArgument("agent block threshold must be 2, 3 or 4");
    }

    wire::Hello hello() const { return {wire::Role::client, options_.name}; }
    const std::string& name() const { return options_.name; }

    /// One raw log line in, at most one query record out.
    std::optional<wire::Query> ingest_line(std::string_view line) {
        auto rec = parse_access_log_line(line);
        if (!rec) {
            bump(&Counters::malformed);
            return std::nullopt;
        }
        return ingest(*rec);
    }

    std::optional<wire::Query> ingest(const AccessLogRecord& rec) {
        if (is_blocked(rec.client_ip)) {
            bump(&Counters::dropped_blocked);
            return std::nullopt;
        }
        wire::Query q;
        {
            std::lock_guard lock(mutex_);
            q.id = ids_.next();
        }
        q.client = options_.name;
        q.ip = rec.client_ip;
        q.timestamp = rec.timestamp;
        q.query = rec.query.text;
        if (wire::encode(q).size() > wire::max_line_bytes) {
            bump(&Counters::oversized);
            return std::nullopt;
        }
        bump(&Counters::emitted);
        return q;
    }

    /// Applies one inbound record from the broker.
    void handle(const wire::Message& msg) {
        if (const auto* v = std::get_if<wire::VerdictRecord>(&msg)) {
            std::lock_guard lock(mutex_);
            ++counters_.verdicts;
            auto [it, inserted] = verdict_levels_.emplace(v->id, v->level);
            if (inserted) {
                verdict_order_.push_back(v->id);
                if (verdict_order_.size() > 65536) {
                    verdict_levels_.erase(verdict_order_.front());
                    verdict_order_.pop_front();
                }
            } else if (v->level > it->second) {
                it->second = v->level;
            }
        } else if (const auto* b = std::get_if<wire::Block>(&msg)) {
            {
                std::lock_guard lock(mutex_);
                auto it = verdict_levels_.find(b->reason);
                // Unknown reason (verdict missed): apply, failing safe.
                if (it != verdict_levels_.end() && it->second < options_.block_threshold) {
                    ++counters_.blocks_ignored;
                    return;
                }
                ++counters_.blocks_applied;
            }
            blocklist_.apply({b->ip, b->issued_at, b->reason});
        }
    }

    bool is_blocked(std::string_view ip) const { return blocklist_.contains(ip, clock_()); }

    const Blocklist& blocklist() const { return blocklist_; }

    Counters counters() const {
        std::lock_guard lock(mutex_);
        return counters_;
    }

private:
    void bump(std::uint64_t Counters::*field) {
        std::lock_guard lock(mutex_);
        ++(counters_.*field);
    }

    AgentOptions options_;
    wire::UuidGenerator ids_;
    Clock clock_;
    Blocklist blocklist_;
    mutable std::mutex mutex_;
    Counters counters_;
    std::unordered_map<std::string, int> verdict_levels_;
    std::deque<std::string> verdict_order_;
};

} // namespace sqlion
