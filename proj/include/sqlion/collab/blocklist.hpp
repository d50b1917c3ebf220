#pragma once

#include <cstdint>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace sqlion {

struct BlockEntry {
    std::string ip;
    std::int64_t issued_at = 0;
    std::string reason;

    friend bool operator==(const BlockEntry&, const BlockEntry&) = default;
};

// Per-client set of blocked source addresses, one entry per ip. Single writer
// (the network task), many readers; a reader never sees a half-applied entry.
class Blocklist {
public:
    Blocklist() = default;
    /// Entries expire `ttl_seconds` after issue; without a TTL they never do.
    explicit Blocklist(std::optional<std::int64_t> ttl_seconds) : ttl_(ttl_seconds) {}

    /// Inserts or replaces the entry for e.ip. An older issue time never
    /// overwrites a newer one, so re-applying a block is a no-op.
    void apply(const BlockEntry& e) {
        std::unique_lock lock(mutex_);
        auto it = entries_.find(e.ip);
        if (it == entries_.end())
            entries_.emplace(e.ip, e);
        else if (e.issued_at >= it->second.issued_at)
            it->second = e;
    }

    bool contains(std::string_view ip, std::int64_t now) const {
        std::shared_lock lock(mutex_);
        auto it = entries_.find(std::string(ip));
        if (it == entries_.end()) return false;
        return !ttl_ || now < it->second.issued_at + *ttl_;
    }

    std::optional<BlockEntry> find(std::string_view ip) const {
        std::shared_lock lock(mutex_);
        auto it = entries_.find(std::string(ip));
        if (it == entries_.end()) return std::nullopt;
        return it->second;
    }

    std::size_t size() const {
        std::shared_lock lock(mutex_);
        return entries_.size();
    }

    std::vector<BlockEntry> snapshot() const {
        std::shared_lock lock(mutex_);
        std::vector<BlockEntry> out;
        out.reserve(entries_.size());
        for (const auto& [ip, e] : entries_) out.push_back(e);
        return out;
    }

private:
    mutable std::shared_mutex mutex_;
    std::unordered_map<std::string, BlockEntry> entries_;
    std::optional<std::int64_t> ttl_;
};

} // namespace sqlion
