#pragma once

#include <chrono>
#include <cstdint>
#include <functional>

namespace sqlion {

// Seconds since the epoch. Injected so the in-process harness can run on a
// fixed clock.
using Clock = std::function<std::int64_t()>;

inline std::int64_t wall_clock_seconds() {
    return std::chrono::duration_cast<std::chrono::seconds>(std::chrono::system_clock::now().time_since_epoch())
        .count();
}

} // namespace sqlion
