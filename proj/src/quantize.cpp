#include "cofkit/quantize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>

#include <nlohmann/json.hpp>

namespace cofkit {
namespace {

double dist2(const LabColor& a, const LabColor& b) {
  const double d0 = a[0] - b[0];
  const double d1 = a[1] - b[1];
  const double d2 = a[2] - b[2];
  return d0 * d0 + d1 * d1 + d2 * d2;
}

int nearest(const std::vector<LabColor>& centers, const LabColor& p, double* best_d2 = nullptr) {
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (int c = 0; c < static_cast<int>(centers.size()); ++c) {
    const double d = dist2(centers[c], p);
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  if (best_d2) *best_d2 = best_d;
  return best;
}

std::vector<LabColor> grid_samples(const LabImage& img, int spacing) {
  std::vector<LabColor> samples;
  for (int y = 0; y < img.height; y += spacing) {
    for (int x = 0; x < img.width; x += spacing) {
      samples.push_back({img.at(x, y, 0), img.at(x, y, 1), img.at(x, y, 2)});
    }
  }
  return samples;
}

// Uniform double in [0,1) from the raw engine output, so results do not
// depend on the standard library's distribution implementation.
double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::vector<LabColor> seed_plus_plus(const std::vector<LabColor>& samples, int k,
                                     std::mt19937_64& rng) {
  std::vector<LabColor> centers;
  centers.reserve(k);
  centers.push_back(samples[rng() % samples.size()]);
  std::vector<double> d2(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) d2[i] = dist2(samples[i], centers[0]);

  while (static_cast<int>(centers.size()) < k) {
    double total = 0.0;
    for (double d : d2) total += d;
    std::size_t pick = 0;
    if (total > 0.0) {
      const double target = unit(rng) * total;
      double acc = 0.0;
      pick = samples.size();
      for (std::size_t i = 0; i < samples.size(); ++i) {
        if (d2[i] <= 0.0) continue;
        acc += d2[i];
        pick = i;
        if (acc > target) break;
      }
    }
    centers.push_back(samples[pick]);
    for (std::size_t i = 0; i < samples.size(); ++i) {
      d2[i] = std::min(d2[i], dist2(samples[i], centers.back()));
    }
  }
  return centers;
}

}  // namespace

KMeansResult kmeans(const LabImage& img, const KMeansOptions& options) {
  if (options.k < 1 || options.k > 256) throw Error("kmeans: k must be in [1, 256]");
  if (options.grid_spacing < 1) throw Error("kmeans: grid spacing must be >= 1");
  if (img.empty()) throw Error("kmeans: empty image");

  const std::vector<LabColor> samples = grid_samples(img, options.grid_spacing);
  const std::set<LabColor> distinct(samples.begin(), samples.end());
  const int k = std::min<int>(options.k, static_cast<int>(distinct.size()));

  std::mt19937_64 rng(options.seed);
  KMeansResult result;
  std::vector<LabColor> centers = seed_plus_plus(samples, k, rng);
  std::vector<int> assignment(samples.size(), 0);

  for (int iter = 0; iter < options.max_iterations; ++iter) {
    double objective = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
      double d = 0.0;
      assignment[i] = nearest(centers, samples[i], &d);
      objective += d;
    }
    result.objective.push_back(objective);

    std::vector<LabColor> sums(k, LabColor{0.0, 0.0, 0.0});
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t i = 0; i < samples.size(); ++i) {
      for (int c = 0; c < 3; ++c) sums[assignment[i]][c] += samples[i][c];
      ++counts[assignment[i]];
    }

    std::vector<LabColor> updated(k);
    for (int c = 0; c < k; ++c) {
      if (counts[c] == 0) continue;
      for (int d = 0; d < 3; ++d) updated[c][d] = sums[c][d] / static_cast<double>(counts[c]);
    }
    // Empty clusters take the sample farthest from its current center.
    std::vector<bool> taken(samples.size(), false);
    for (int c = 0; c < k; ++c) {
      if (counts[c] != 0) continue;
      std::size_t far = 0;
      double far_d = -1.0;
      for (std::size_t i = 0; i < samples.size(); ++i) {
        if (taken[i]) continue;
        const double d = dist2(samples[i], centers[assignment[i]]);
        if (d > far_d) {
          far_d = d;
          far = i;
        }
      }
      updated[c] = samples[far];
      taken[far] = true;
    }

    double shift = 0.0;
    for (int c = 0; c < k; ++c) shift = std::max(shift, std::sqrt(dist2(centers[c], updated[c])));
    centers = std::move(updated);
    result.iterations = iter + 1;
    if (shift < options.tolerance) break;
  }

  result.palette.centers = std::move(centers);
  result.palette.seed = options.seed;
  result.palette.requested_k = options.k;
  return result;
}

GuidanceImage assign_hard(const LabImage& img, const Palette& palette) {
  if (palette.centers.empty()) throw Error("assign_hard: empty palette");
  GuidanceImage guide{img.width, img.height, palette.k(), std::vector<int>(img.pixel_count())};
  for (std::size_t i = 0; i < img.pixel_count(); ++i) {
    const double* px = img.pixel(i);
    guide.labels[i] = nearest(palette.centers, {px[0], px[1], px[2]});
  }
  return guide;
}

AffinityMatrix cluster_affinity(const Palette& palette, double sigma_r) {
  if (sigma_r < 0.0) throw Error("cluster_affinity: sigma_r must be >= 0");
  const int k = palette.k();
  AffinityMatrix K{k, sigma_r, std::vector<double>(static_cast<std::size_t>(k) * k, 0.0)};
  for (int a = 0; a < k; ++a) {
    double* row = K.values.data() + static_cast<std::size_t>(a) * k;
    if (sigma_r == 0.0) {
      row[a] = 1.0;
      continue;
    }
    double z = 0.0;
    for (int b = 0; b < k; ++b) {
      row[b] = std::exp(-dist2(palette.centers[a], palette.centers[b]) / (2.0 * sigma_r * sigma_r));
      z += row[b];
    }
    for (int b = 0; b < k; ++b) row[b] /= z;
  }
  return K;
}

double default_sigma_r(const Palette& palette) {
  const int k = palette.k();
  if (k < 2) throw Error("default_sigma_r: need at least two centers");
  double total = 0.0;
  for (int a = 0; a < k; ++a) {
    double best = std::numeric_limits<double>::infinity();
    for (int b = 0; b < k; ++b) {
      if (b != a) best = std::min(best, dist2(palette.centers[a], palette.centers[b]));
    }
    total += std::sqrt(best);
  }
  return total / k;
}

std::string palette_to_json(const Palette& palette) {
  nlohmann::json j;
  j["k"] = palette.k();
  j["requested_k"] = palette.requested_k;
  j["seed"] = palette.seed;
  j["centers"] = palette.centers;
  return j.dump();
}

Palette palette_from_json(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    Palette p;
    p.centers = j.at("centers").get<std::vector<LabColor>>();
    p.seed = j.value("seed", std::uint64_t{42});
    p.requested_k = j.value("requested_k", p.k());
    if (j.contains("k") && j.at("k").get<int>() != p.k()) {
      throw Error("palette: k does not match number of centers");
    }
    if (p.centers.empty() || p.k() > 256) throw Error("palette: k must be in [1, 256]");
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("palette: malformed JSON: ") + e.what());
  }
}

}  // namespace cofkit
