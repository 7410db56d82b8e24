#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace grwlab {

/// Serial runs are the bit-reproducible reference; parallel runs partition
/// per-node maps into contiguous blocks and must match them exactly.
enum class Execution { kSerial, kParallel };

/// Apply body(k) for k in [0, count). Bodies must write disjoint outputs.
template <typename Body>
void for_each_index(std::size_t count, Execution exec, Body&& body) {
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  if (exec == Execution::kSerial || hw == 1 || count < 4096) {
    for (std::size_t k = 0; k < count; ++k) body(k);
    return;
  }
  const std::size_t workers = std::min<std::size_t>(hw, count);
  const std::size_t block = (count + workers - 1) / workers;
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      const std::size_t begin = w * block;
      const std::size_t end = std::min(count, begin + block);
      if (begin >= end) break;
      pool.emplace_back([begin, end, &body, &failure, &failure_mutex] {
        try {
          for (std::size_t k = begin; k < end; ++k) body(k);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace grwlab
