#pragma once

#include <cstddef>
#include <functional>

namespace betamix {

/// Environment variable capping the worker pool size.
inline constexpr const char* kWorkersEnv = "BETAMIX_WORKERS";

/// Worker count: `requested` if non-zero, else hardware concurrency, capped
/// by BETAMIX_WORKERS when set. Always at least 1.
[[nodiscard]] std::size_t resolve_workers(std::size_t requested = 0);

/// Runs body(i) for i in [0, count) on up to `workers` threads. The first
/// exception thrown by any body is rethrown after all threads join.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body, std::size_t workers = 0);

}  // namespace betamix
