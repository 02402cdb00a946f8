#pragma once

#include <functional>

namespace cofkit {

/// Worker count: hardware concurrency capped by COFKIT_THREADS, unless a
/// ScopedThreadLimit is active.
int worker_count();

/// Pins worker_count() to `limit` for the lifetime of the object
/// (process-wide).
class ScopedThreadLimit {
 public:
  explicit ScopedThreadLimit(int limit);
  ~ScopedThreadLimit();
  ScopedThreadLimit(const ScopedThreadLimit&) = delete;
  ScopedThreadLimit& operator=(const ScopedThreadLimit&) = delete;

 private:
  int previous_;
};

/// Runs body(begin, end) over [0, count) split into fixed chunks of `grain`.
/// Chunk boundaries do not depend on the worker count. `body` also receives
/// the index of the worker running it so callers can keep per-worker state.
void parallel_chunks(int count, int grain, int workers,
                     const std::function<void(int worker, int begin, int end)>& body);

}  // namespace cofkit
