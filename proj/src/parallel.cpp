#include "cofkit/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace cofkit {
namespace {

std::atomic<int> g_limit{0};

int env_limit() {
  const char* value = std::getenv("COFKIT_THREADS");
  if (value == nullptr) return 0;
  const int parsed = std::atoi(value);
  return parsed > 0 ? parsed : 0;
}

}  // namespace

int worker_count() {
  if (const int forced = g_limit.load(); forced > 0) return forced;
  int n = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  if (const int env = env_limit(); env > 0) n = std::min(n, env);
  return n;
}

ScopedThreadLimit::ScopedThreadLimit(int limit) : previous_(g_limit.exchange(limit)) {}
ScopedThreadLimit::~ScopedThreadLimit() { g_limit.store(previous_); }

void parallel_chunks(int count, int grain, int workers,
                     const std::function<void(int, int, int)>& body) {
  if (count <= 0) return;
  grain = std::max(1, grain);
  const int chunks = (count + grain - 1) / grain;
  workers = std::clamp(workers, 1, chunks);
  if (workers == 1) {
    for (int c = 0; c < chunks; ++c) body(0, c * grain, std::min(count, (c + 1) * grain));
    return;
  }

  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto run = [&](int worker) {
    for (;;) {
      const int c = next.fetch_add(1);
      if (c >= chunks) return;
      try {
        body(worker, c * grain, std::min(count, (c + 1) * grain));
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(chunks);
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (int w = 1; w < workers; ++w) pool.emplace_back(run, w);
  run(0);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace cofkit
