#include "cofkit/cli.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "cofkit/bench.hpp"
#include "cofkit/color.hpp"
#include "cofkit/fixtures.hpp"
#include "cofkit/image_io.hpp"
#include "cofkit/matrix_io.hpp"
#include "cofkit/pipeline.hpp"
#include "cofkit/scribbles.hpp"
#include "cofkit/service.hpp"

namespace cofkit {
namespace {

/// Raised for invalid combinations detected after parsing.
struct UsageError : Error {
  using Error::Error;
};

/// Pipeline flags; unset flags keep the config-file (or default) value.
struct PipelineFlags {
  std::string config_path;
  std::optional<int> k, grid_spacing, window, iterations;
  std::optional<double> sigma_s2, sigma_r, epsilon;
  std::optional<std::string> mode, region_mask, matrix_in, matrix_out;
  std::optional<std::uint64_t> seed;

  void add_to(CLI::App* app) {
    app->add_option("--config", config_path, "JSON config file (flags override it)")->check(CLI::ExistingFile);
    app->add_option("--k", k, "Number of color clusters")->check(CLI::Range(1, 256));
    app->add_option("--grid-spacing", grid_spacing, "k-means sampling grid spacing")->check(CLI::Range(1, 1 << 20));
    app->add_option("--window", window, "Window radius (7 = 15x15)")->check(CLI::Range(0, 64));
    app->add_option("--sigma-s2", sigma_s2, "Spatial variance sigma_s^2")->check(CLI::PositiveNumber);
    app->add_option("--sigma-r", sigma_r, "Cluster affinity bandwidth (Lab units)")->check(CLI::NonNegativeNumber);
    app->add_option("--epsilon", epsilon, "PMI denominator regularizer")->check(CLI::NonNegativeNumber);
    app->add_option("--iterations", iterations, "Filter rounds")->check(CLI::Range(0, 1000));
    app->add_option("--mode", mode, "iterative or rolling")->check(CLI::IsMember({"iterative", "rolling"}));
    app->add_option("--seed", seed, "k-means seed");
    app->add_option("--region-mask", region_mask, "Collect statistics only under this mask PNG");
    app->add_option("--matrix-in", matrix_in, "Reuse a dumped matrix instead of learning one");
    app->add_option("--matrix-out", matrix_out, "Dump the matrix used");
  }

  PipelineConfig resolve() const {
    PipelineConfig cfg;
    try {
      if (!config_path.empty()) cfg = load_config(config_path);
    } catch (const Error& e) {
      throw UsageError(e.what());
    }
    if (k) cfg.k = *k;
    if (grid_spacing) cfg.grid_spacing = *grid_spacing;
    if (window) cfg.window = *window;
    if (iterations) cfg.iterations = *iterations;
    if (sigma_s2) cfg.sigma_s2 = *sigma_s2;
    if (sigma_r) cfg.sigma_r = *sigma_r;
    if (epsilon) cfg.epsilon = *epsilon;
    if (mode) cfg.mode = *mode == "rolling" ? IterationMode::Rolling : IterationMode::Iterative;
    if (seed) cfg.seed = *seed;
    if (region_mask) cfg.region_mask = *region_mask;
    if (matrix_in) cfg.matrix_in = *matrix_in;
    if (matrix_out) cfg.matrix_out = *matrix_out;
    try {
      cfg.validate();
    } catch (const Error& e) {
      throw UsageError(e.what());
    }
    return cfg;
  }
};

PmiMatrix load_region_matrix(const std::string& path, const Palette** palette_out,
                             std::optional<Palette>& storage) {
  MatrixFile file = load_matrix(path);
  if (file.kind != MatrixFile::Kind::Pmi) throw Error("'" + path + "' is not a PMI matrix");
  if (!file.palette) throw Error("'" + path + "' carries no palette");
  storage = *file.palette;
  *palette_out = &*storage;
  return file.pmi();
}

int run(int argc, char** argv) {
  CLI::App app{"cofkit: co-occurrence filtering"};
  app.require_subcommand(1);

  // filter
  auto* filter = app.add_subcommand("filter", "Run the guided co-occurrence filter");
  std::string filter_in, filter_out;
  PipelineFlags filter_flags;
  filter->add_option("input", filter_in, "Input image (PNG, PPM, PGM)")->required()->check(CLI::ExistingFile);
  filter->add_option("-o,--output", filter_out, "Output PNG")->required();
  filter_flags.add_to(filter);

  // iterate
  auto* iter = app.add_subcommand("iterate", "Iterate the filter and write the MSD series as CSV");
  std::string iter_in, iter_out, iter_csv;
  PipelineFlags iter_flags;
  iter->add_option("input", iter_in, "Input image")->required()->check(CLI::ExistingFile);
  iter->add_option("--csv", iter_csv, "CSV output (iteration,msd)")->required();
  iter->add_option("-o,--output", iter_out, "Final image PNG");
  iter_flags.add_to(iter);

  // fb / recolor share their inputs
  struct TwoMatrixArgs {
    std::string input, output, fg, bg;
    int window = 7;
    double sigma_s2 = 2.0 * std::sqrt(15.0) + 1.0;
    bool no_spatial = false;
  };
  TwoMatrixArgs fb_args, recolor_args;
  auto add_two_matrix = [](CLI::App* cmd, TwoMatrixArgs& a) {
    cmd->add_option("input", a.input, "Input image")->required()->check(CLI::ExistingFile);
    cmd->add_option("-o,--output", a.output, "Output PNG")->required();
    cmd->add_option("--fg", a.fg, "Foreground matrix (from `mask --fg-out`)")->required()->check(CLI::ExistingFile);
    cmd->add_option("--bg", a.bg, "Background matrix (from `mask --bg-out`)")->required()->check(CLI::ExistingFile);
    cmd->add_option("--window", a.window, "Window radius")->check(CLI::Range(0, 64));
    cmd->add_option("--sigma-s2", a.sigma_s2, "Spatial variance")->check(CLI::PositiveNumber);
  };
  auto* fb = app.add_subcommand("fb", "Foreground-sharp / background-smooth filter");
  add_two_matrix(fb, fb_args);
  fb->add_flag("--no-spatial", fb_args.no_spatial, "Drop the spatial Gaussian from the weights");
  auto* recolor = app.add_subcommand("recolor", "Keep the foreground in color, turn the background gray");
  add_two_matrix(recolor, recolor_args);

  // mask
  auto* mask = app.add_subcommand("mask", "Grow scribbles into a foreground mask");
  std::string mask_in, mask_scribbles, mask_out, mask_fg_out, mask_bg_out;
  double mask_threshold = 0.5;
  int mask_rounds = 5;
  PipelineFlags mask_flags;
  mask->add_option("input", mask_in, "Input image")->required()->check(CLI::ExistingFile);
  mask->add_option("--scribbles", mask_scribbles, "Scribble PNG (red = foreground, blue = background)")
      ->required()->check(CLI::ExistingFile);
  mask->add_option("-o,--output", mask_out, "Mask PNG")->required();
  mask->add_option("--threshold", mask_threshold, "Fraction of the peak response kept")->check(CLI::Range(0.0, 1.0));
  mask->add_option("--rounds", mask_rounds, "Propagation rounds")->check(CLI::Range(0, 1000));
  mask->add_option("--fg-out", mask_fg_out, "Dump the foreground matrix");
  mask->add_option("--bg-out", mask_bg_out, "Dump the background matrix");
  mask_flags.add_to(mask);

  // cooc
  auto* cooc = app.add_subcommand("cooc", "Learn and dump the co-occurrence (PMI) matrix");
  std::string cooc_in, cooc_out;
  bool cooc_gray = false;
  PipelineFlags cooc_flags;
  cooc->add_option("input", cooc_in, "Input image")->required()->check(CLI::ExistingFile);
  cooc->add_option("-o,--output", cooc_out, "Matrix JSON")->required();
  cooc->add_flag("--gray", cooc_gray, "256-level gray statistics instead of the quantized path");
  cooc_flags.add_to(cooc);

  // bench
  auto* bench = app.add_subcommand("bench", "Time collection and filtering");
  BenchOptions bench_opts;
  bool bench_json = false;
  bench->add_option("--size", bench_opts.size, "Image side in pixels")->check(CLI::Range(1, 8192));
  bench->add_option("--window", bench_opts.window, "Window radius")->check(CLI::Range(0, 64));
  bench->add_option("--k", bench_opts.k, "Clusters")->check(CLI::Range(1, 256));
  bench->add_option("--threads", bench_opts.threads, "Worker threads (0 = all)")->check(CLI::Range(0, 1024));
  bench->add_flag("--json", bench_json, "JSON report");

  // fixtures
  auto* fixtures = app.add_subcommand("fixtures", "Write synthetic test images");
  std::string fix_name = "two-region-checkerboard", fix_out;
  int fix_width = 256, fix_height = 256;
  double fix_noise = 0.0;
  std::uint64_t fix_seed = 1;
  fixtures->add_option("--name", fix_name, "Fixture name")->check(CLI::IsMember(fixture_names()));
  fixtures->add_option("--width", fix_width, "Width")->check(CLI::Range(1, 16384));
  fixtures->add_option("--height", fix_height, "Height")->check(CLI::Range(1, 16384));
  fixtures->add_option("--noise", fix_noise, "Gaussian noise sigma")->check(CLI::NonNegativeNumber);
  fixtures->add_option("--seed", fix_seed, "Noise seed");
  fixtures->add_option("-o,--output", fix_out, "Output PNG")->required();

  // serve
  auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP service");
  std::string host = "127.0.0.1";
  int port = 8080;
  std::size_t sessions = 8;
  serve_cmd->add_option("--host", host, "Bind address");
  serve_cmd->add_option("--port", port, "Port")->check(CLI::Range(1, 65535));
  serve_cmd->add_option("--sessions", sessions, "Sessions kept in memory")->check(CLI::Range(1, 1024));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*filter) {
      const PipelineConfig cfg = filter_flags.resolve();
      save_image(run_pipeline(cfg, load_image(filter_in)), filter_out);
    } else if (*iter) {
      const PipelineConfig cfg = iter_flags.resolve();
      const PipelineResult result = run_pipeline_detailed(cfg, load_image(iter_in));
      std::ofstream csv(iter_csv);
      if (!csv) throw Error("cannot write '" + iter_csv + "'");
      csv << "iteration,msd\n";
      csv.precision(17);
      for (std::size_t i = 0; i < result.msd.size(); ++i) csv << (i + 1) << ',' << result.msd[i] << '\n';
      if (!iter_out.empty()) save_image(result.image, iter_out);
    } else if (*fb || *recolor) {
      const TwoMatrixArgs& a = *fb ? fb_args : recolor_args;
      std::optional<Palette> fg_palette, bg_palette;
      const Palette* palette_f = nullptr;
      const Palette* palette_b = nullptr;
      const PmiMatrix m_f = load_region_matrix(a.fg, &palette_f, fg_palette);
      const PmiMatrix m_b = load_region_matrix(a.bg, &palette_b, bg_palette);
      if (!(*palette_f == *palette_b)) throw Error("foreground and background matrices use different palettes");
      const ColorImage img = load_image(a.input);
      const GuidanceImage guide = assign_hard(rgb_to_lab(img), *palette_f);
      FilterParams params;
      params.window = a.window;
      params.sigma_s = std::sqrt(a.sigma_s2);
      params.fb_spatial = !a.no_spatial;
      const ColorImage out = *fb ? fb_cof(img, guide, m_f, m_b, params) : selective_gray(img, guide, m_f, m_b, params);
      save_image(out, a.output);
    } else if (*mask) {
      const PipelineConfig cfg = mask_flags.resolve();
      const ColorImage img = load_image(mask_in);
      const ScribbleSet strokes = scribbles_from_image(load_image(mask_scribbles));
      if (strokes.width != img.width || strokes.height != img.height) {
        throw UsageError("scribble image size differs from the input");
      }
      const PipelineModel model = build_model(cfg, img);
      const RegionMask fg = propagate_scribbles(strokes, model.guided.guide, model.guided.pmi,
                                                cfg.filter_params(), {mask_threshold, mask_rounds});
      save_mask(fg, mask_out);
      const double sigma = std::sqrt(cfg.sigma_s2);
      if (!mask_fg_out.empty()) {
        save_matrix(MatrixFile::from(region_pmi(cfg, model, fg), sigma, cfg.window, model.guided.palette), mask_fg_out);
      }
      if (!mask_bg_out.empty()) {
        save_matrix(MatrixFile::from(region_pmi(cfg, model, fg.complement()), sigma, cfg.window, model.guided.palette),
                    mask_bg_out);
      }
    } else if (*cooc) {
      const PipelineConfig cfg = cooc_flags.resolve();
      const ColorImage img = load_image(cooc_in);
      std::optional<RegionMask> region;
      if (!cfg.region_mask.empty()) region = load_mask(cfg.region_mask);
      const double sigma = std::sqrt(cfg.sigma_s2);
      if (cooc_gray) {
        const CoocStats stats = collect_gray(rgb_to_gray(img), sigma, cfg.window, region ? &*region : nullptr);
        save_matrix(MatrixFile::from(normalize_pmi(stats.cooc, stats.hist, cfg.epsilon), sigma, cfg.window), cooc_out);
      } else {
        const PipelineModel model = build_model(cfg, img, region ? &*region : nullptr);
        save_matrix(MatrixFile::from(model.guided.pmi, sigma, cfg.window, model.guided.palette), cooc_out);
      }
    } else if (*bench) {
      const BenchReport report = run_bench(bench_opts);
      std::cout << (bench_json ? report.to_json() + "\n" : report.to_text());
    } else if (*fixtures) {
      save_image(make_fixture(fix_name, fix_width, fix_height, fix_noise, fix_seed), fix_out);
    } else if (*serve_cmd) {
      return serve(host, port, sessions);
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace

int cli_main(int argc, char** argv) { return run(argc, argv); }

int cli_main(const std::vector<std::string>& args) {
  std::vector<std::string> storage = args;
  storage.insert(storage.begin(), "cofkit");
  std::vector<char*> argv;
  for (auto& s : storage) argv.push_back(s.data());
  return run(static_cast<int>(argv.size()), argv.data());
}

}  // namespace cofkit
