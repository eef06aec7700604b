#include "sgdlab/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <thread>
#include <vector>

namespace sgdlab {

int worker_count() {
  int cap = 0;
  if (const char* env = std::getenv("SGDLAB_THREADS")) {
    cap = std::atoi(env);
    if (cap < 0) cap = 0;
  }
  if (cap == 0) cap = static_cast<int>(std::thread::hardware_concurrency());
  return std::max(cap, 1);
}

void parallel_for(std::int64_t count, const std::function<void(std::int64_t)>& fn) {
  if (count <= 0) return;
  const int workers = static_cast<int>(std::min<std::int64_t>(worker_count(), count));
  if (workers == 1) {
    for (std::int64_t i = 0; i < count; ++i) fn(i);
    return;
  }

  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(count));
  const std::int64_t block = (count + workers - 1) / workers;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    const std::int64_t begin = static_cast<std::int64_t>(w) * block;
    const std::int64_t end = std::min(begin + block, count);
    if (begin >= end) break;
    pool.emplace_back([&, begin, end] {
      for (std::int64_t i = begin; i < end; ++i) {
        try {
          fn(i);
        } catch (...) {
          errors[static_cast<std::size_t>(i)] = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace sgdlab
