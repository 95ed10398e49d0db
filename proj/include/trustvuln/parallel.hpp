#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <functional>

namespace trustvuln {

/// Work is always split into chunks of this many elements, whatever the
/// worker count, so chunked reductions combine identically for any
/// `--threads` value.
inline constexpr std::size_t kChunkSize = 4096;

/// Environment variable consulted when no explicit thread count is given.
inline constexpr const char* kThreadsEnv = "TRUSTVULN_THREADS";

/// 0 means "default": the environment variable if set and valid, else 1.
unsigned resolve_threads(unsigned requested);

/// Calls `body(begin, end)` once per fixed-size chunk of [0, n). Chunks may run
/// concurrently on up to `threads` workers; the first exception thrown by any
/// chunk is rethrown after all workers finish.
void for_each_chunk(std::size_t n, unsigned threads,
                    const std::function<void(std::size_t, std::size_t)>& body);

/// Sum of `v`, reduced per chunk and then across chunks in index order.
double chunked_sum(const Eigen::VectorXd& v, unsigned threads);

}  // namespace trustvuln
