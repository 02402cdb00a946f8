#include "cofkit/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cofkit/color.hpp"
#include "cofkit/image_io.hpp"
#include "cofkit/matrix_io.hpp"

namespace cofkit {
namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

template <typename F>
auto stage(const char* name, double* ms, F&& body) {
  const auto start = Clock::now();
  try {
    auto result = body();
    if (ms) *ms += elapsed_ms(start);
    return result;
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(name, e.what());
  }
}

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {"k",          "grid_spacing", "window",     "sigma_s2",
                                             "sigma_r",    "epsilon",      "iterations", "mode",
                                             "seed",       "region_mask",  "matrix_in",  "matrix_out"};
  return keys;
}

}  // namespace

void PipelineConfig::validate() const {
  auto fail = [](const std::string& field, const std::string& rule) {
    throw Error("config: " + field + " " + rule);
  };
  if (k < 1 || k > 256) fail("k", "must be in [1, 256]");
  if (grid_spacing < 1) fail("grid_spacing", "must be >= 1");
  if (window < 0 || window > 64) fail("window", "must be in [0, 64]");
  if (!(sigma_s2 > 0.0) || !std::isfinite(sigma_s2)) fail("sigma_s2", "must be > 0");
  if (sigma_r && (!(*sigma_r >= 0.0) || !std::isfinite(*sigma_r))) fail("sigma_r", "must be >= 0");
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) fail("epsilon", "must be >= 0");
  if (iterations < 0 || iterations > 1000) fail("iterations", "must be in [0, 1000]");
}

FilterParams PipelineConfig::filter_params() const {
  FilterParams p;
  p.window = window;
  p.sigma_s = std::sqrt(sigma_s2);
  p.iterations = iterations;
  p.mode = mode;
  return p;
}

PipelineConfig config_from_json(const std::string& text, PipelineConfig cfg) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("config: malformed JSON: ") + e.what());
  }
  if (!j.is_object()) throw Error("config: expected a JSON object");
  for (const auto& item : j.items()) {
    if (!known_keys().count(item.key())) throw Error("config: unknown key '" + item.key() + "'");
  }
  try {
    if (j.contains("k")) cfg.k = j["k"].get<int>();
    if (j.contains("grid_spacing")) cfg.grid_spacing = j["grid_spacing"].get<int>();
    if (j.contains("window")) cfg.window = j["window"].get<int>();
    if (j.contains("sigma_s2")) cfg.sigma_s2 = j["sigma_s2"].get<double>();
    if (j.contains("sigma_r")) {
      if (j["sigma_r"].is_null()) {
        cfg.sigma_r.reset();
      } else {
        cfg.sigma_r = j["sigma_r"].get<double>();
      }
    }
    if (j.contains("epsilon")) cfg.epsilon = j["epsilon"].get<double>();
    if (j.contains("iterations")) cfg.iterations = j["iterations"].get<int>();
    if (j.contains("mode")) {
      const auto mode = j["mode"].get<std::string>();
      if (mode == "iterative") {
        cfg.mode = IterationMode::Iterative;
      } else if (mode == "rolling") {
        cfg.mode = IterationMode::Rolling;
      } else {
        throw Error("config: mode must be 'iterative' or 'rolling'");
      }
    }
    if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("region_mask")) cfg.region_mask = j["region_mask"].get<std::string>();
    if (j.contains("matrix_in")) cfg.matrix_in = j["matrix_in"].get<std::string>();
    if (j.contains("matrix_out")) cfg.matrix_out = j["matrix_out"].get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("config: wrong value type: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

std::string config_to_json(const PipelineConfig& cfg) {
  nlohmann::json j;
  j["k"] = cfg.k;
  j["grid_spacing"] = cfg.grid_spacing;
  j["window"] = cfg.window;
  j["sigma_s2"] = cfg.sigma_s2;
  j["sigma_r"] = cfg.sigma_r ? nlohmann::json(*cfg.sigma_r) : nlohmann::json(nullptr);
  j["epsilon"] = cfg.epsilon;
  j["iterations"] = cfg.iterations;
  j["mode"] = cfg.mode == IterationMode::Iterative ? "iterative" : "rolling";
  j["seed"] = cfg.seed;
  j["region_mask"] = cfg.region_mask;
  j["matrix_in"] = cfg.matrix_in;
  j["matrix_out"] = cfg.matrix_out;
  return j.dump(2);
}

PipelineConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("config: cannot read '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return config_from_json(ss.str());
}

PipelineModel build_model(const PipelineConfig& cfg, const ColorImage& img, const RegionMask* mask,
                          StageTimings* timings) {
  cfg.validate();
  StageTimings local;
  StageTimings& t = timings ? *timings : local;
  const double sigma = std::sqrt(cfg.sigma_s2);

  PipelineModel model;
  model.guided.palette = stage("quantize", &t.quantize_ms, [&] {
    return kmeans_palette(rgb_to_lab(img), cfg.k, cfg.grid_spacing, cfg.seed);
  });
  model.guided.guide = stage("quantize", &t.quantize_ms, [&] {
    return assign_hard(rgb_to_lab(img), model.guided.palette);
  });
  const CoocStats hard = stage("cooccurrence", &t.collect_ms, [&] {
    return collect_hard(model.guided.guide, sigma, cfg.window, mask);
  });
  model.affinity = stage("hard2soft", &t.soften_ms, [&] {
    const Palette& palette = model.guided.palette;
    double sigma_r = 0.0;
    if (cfg.sigma_r) {
      sigma_r = *cfg.sigma_r;
    } else if (palette.k() >= 2) {
      sigma_r = default_sigma_r(palette);
    }
    return cluster_affinity(palette, sigma_r);
  });
  const CoocMatrix soft = stage("hard2soft", &t.soften_ms, [&] { return hard_to_soft(hard.cooc, model.affinity); });
  const Histogram soft_hist = stage("hard2soft", &t.soften_ms, [&] { return soft_histogram(hard.hist, model.affinity); });
  model.guided.pmi = stage("cooc2pmi", &t.normalize_ms, [&] { return normalize_pmi(soft, soft_hist, cfg.epsilon); });
  return model;
}

PmiMatrix region_pmi(const PipelineConfig& cfg, const PipelineModel& model, const RegionMask& mask) {
  const double sigma = std::sqrt(cfg.sigma_s2);
  const CoocStats hard = stage("cooccurrence", nullptr, [&] {
    return collect_hard(model.guided.guide, sigma, cfg.window, &mask);
  });
  return stage("cooc2pmi", nullptr, [&] {
    return normalize_pmi(hard_to_soft(hard.cooc, model.affinity),
                         soft_histogram(hard.hist, model.affinity), cfg.epsilon);
  });
}

PipelineResult run_pipeline_detailed(const PipelineConfig& cfg, const ColorImage& img) {
  cfg.validate();
  if (img.empty()) throw Error("pipeline: empty image");
  PipelineResult result;

  std::optional<RegionMask> mask;
  if (!cfg.region_mask.empty()) {
    mask = stage("cooccurrence", nullptr, [&] { return load_mask(cfg.region_mask); });
  }

  if (!cfg.matrix_in.empty()) {
    const MatrixFile file = stage("cooc2pmi", nullptr, [&] { return load_matrix(cfg.matrix_in); });
    if (file.kind != MatrixFile::Kind::Pmi || !file.palette) {
      throw StageError("cooc2pmi", "'" + cfg.matrix_in + "' is not a PMI matrix with a palette");
    }
    PipelineModel& model = result.model;
    model.guided.palette = *file.palette;
    model.guided.pmi = file.pmi();
    model.guided.guide = stage("quantize", &result.timings.quantize_ms, [&] {
      return assign_hard(rgb_to_lab(img), model.guided.palette);
    });
    const double sigma_r = cfg.sigma_r ? *cfg.sigma_r
                                       : (model.guided.palette.k() >= 2 ? default_sigma_r(model.guided.palette) : 0.0);
    model.affinity = cluster_affinity(model.guided.palette, sigma_r);
  } else {
    result.model = build_model(cfg, img, mask ? &*mask : nullptr, &result.timings);
  }

  if (!cfg.matrix_out.empty()) {
    stage("cooc2pmi", nullptr, [&] {
      save_matrix(MatrixFile::from(result.model.guided.pmi, std::sqrt(cfg.sigma_s2), cfg.window,
                                   result.model.guided.palette),
                  cfg.matrix_out);
      return 0;
    });
  }

  ModelBuilder rebuild = [&](const ColorImage& current) {
    return build_model(cfg, current, mask ? &*mask : nullptr).guided;
  };
  IterationResult iterated = stage("cof", &result.timings.filter_ms, [&] {
    return iterate(img, result.model.guided, cfg.filter_params(), rebuild);
  });
  result.image = std::move(iterated.image);
  result.msd = std::move(iterated.msd);
  return result;
}

}  // namespace cofkit
