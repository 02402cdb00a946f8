#pragma once

#include <cstdint>
#include <string>

namespace cofkit {

struct BenchOptions {
  int size = 1024;
  int window = 7;
  int k = 32;
  /// 0 keeps the default worker count.
  int threads = 1;
  std::uint64_t seed = 42;
};

struct BenchReport {
  int width = 0;
  int height = 0;
  int window = 0;
  int k = 0;
  int threads = 0;
  double quantize_s = 0.0;
  /// Hard collection, hard-to-soft and normalization together.
  double collect_s = 0.0;
  double filter_s = 0.0;

  std::string to_text() const;
  std::string to_json() const;
};

/// Times the pipeline stages on a size x size noisy checkerboard fixture.
BenchReport run_bench(const BenchOptions& options);

}  // namespace cofkit
