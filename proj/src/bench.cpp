#include "cofkit/bench.hpp"

#include <chrono>
#include <cstdio>
#include <optional>

#include <nlohmann/json.hpp>

#include "cofkit/fixtures.hpp"
#include "cofkit/parallel.hpp"
#include "cofkit/pipeline.hpp"

namespace cofkit {

BenchReport run_bench(const BenchOptions& options) {
  std::optional<ScopedThreadLimit> limit;
  if (options.threads > 0) limit.emplace(options.threads);

  PipelineConfig cfg;
  cfg.window = options.window;
  cfg.k = options.k;
  cfg.seed = options.seed;
  const ColorImage img = make_fixture("two-region-checkerboard", options.size, options.size, 0.05, options.seed);

  StageTimings timings;
  const PipelineModel model = build_model(cfg, img, nullptr, &timings);
  FilterParams params = cfg.filter_params();
  params.iterations = 1;
  const auto start = std::chrono::steady_clock::now();
  const ColorImage out = guided_cof(img, model.guided.guide, model.guided.pmi, params);
  const double filter_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();

  BenchReport report;
  report.width = img.width;
  report.height = img.height;
  report.window = options.window;
  report.k = model.guided.palette.k();
  report.threads = worker_count();
  report.quantize_s = timings.quantize_ms / 1000.0;
  report.collect_s = (timings.collect_ms + timings.soften_ms + timings.normalize_ms) / 1000.0;
  report.filter_s = filter_ms / 1000.0;
  return report;
}

std::string BenchReport::to_text() const {
  char buf[512];
  std::snprintf(buf, sizeof(buf),
                "image      %dx%d (%.2f MP)\n"
                "window     %dx%d\n"
                "k          %d\n"
                "threads    %d\n"
                "quantize   %.3f s\n"
                "collection %.3f s\n"
                "filter     %.3f s\n",
                width, height, width * static_cast<double>(height) / 1e6, 2 * window + 1,
                2 * window + 1, k, threads, quantize_s, collect_s, filter_s);
  return buf;
}

std::string BenchReport::to_json() const {
  nlohmann::json j = {{"width", width},           {"height", height},       {"window", window},
                      {"k", k},                   {"threads", threads},     {"quantize_s", quantize_s},
                      {"collection_s", collect_s}, {"filter_s", filter_s}};
  return j.dump(2);
}

}  // namespace cofkit
