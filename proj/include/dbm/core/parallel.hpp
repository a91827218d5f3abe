// Copyright 2026 The dbm-tridiag Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "dbm/core/error.hpp"

namespace dbm {

/// Worker count: explicit request, then DBM_THREADS, then hardware threads.
inline unsigned resolve_threads(std::optional<unsigned> requested = std::nullopt) {
  if (requested && *requested > 0) return *requested;
  if (const char* env = std::getenv("DBM_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v > 0) return static_cast<unsigned>(v);
    } catch (const std::exception&) {
      throw ParameterError(std::string("DBM_THREADS is not a positive integer: ") + env);
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

struct ParallelOptions {
  unsigned threads = 1;
  /// Samples per chunk. Chunk boundaries depend only on this value, so the
  /// reduction order (and the floating-point result) is thread-count
  /// independent.
  std::size_t chunk = 16;
};

/// Evaluates fn(begin, end) on consecutive chunks of [0, items) and returns
/// the per-chunk results in chunk order.
template <class Result, class Fn>
std::vector<Result> map_chunks(std::size_t items, const ParallelOptions& opts, Fn&& fn) {
  const std::size_t chunk = std::max<std::size_t>(1, opts.chunk);
  const std::size_t chunks = (items + chunk - 1) / chunk;
  std::vector<std::optional<Result>> slots(chunks);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    for (;;) {
      const std::size_t c = next.fetch_add(1);
      if (c >= chunks) return;
      try {
        const std::size_t begin = c * chunk;
        slots[c].emplace(fn(begin, std::min(items, begin + chunk)));
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(chunks);
        return;
      }
    }
  };

  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(std::max(1u, opts.threads), chunks));
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned i = 0; i < workers; ++i) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  std::vector<Result> out;
  out.reserve(chunks);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

}  // namespace dbm
