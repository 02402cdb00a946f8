#include "cofkit/cooc.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>

#include "cofkit/parallel.hpp"

namespace cofkit {
namespace {

struct Offset {
  int dx;
  int dy;
  int distance_class;
};

// One representative per unordered pair: dy > 0, or dy == 0 and dx > 0.
std::vector<Offset> half_window(int window, std::vector<int>& class_d2) {
  std::vector<Offset> offsets;
  for (int dy = 0; dy <= window; ++dy) {
    for (int dx = -window; dx <= window; ++dx) {
      if (dy == 0 && dx <= 0) continue;
      const int d2 = dx * dx + dy * dy;
      auto it = std::lower_bound(class_d2.begin(), class_d2.end(), d2);
      if (it == class_d2.end() || *it != d2) it = class_d2.insert(it, d2);
      offsets.push_back({dx, dy, 0});
    }
  }
  for (auto& o : offsets) {
    const int d2 = o.dx * o.dx + o.dy * o.dy;
    o.distance_class = static_cast<int>(
        std::lower_bound(class_d2.begin(), class_d2.end(), d2) - class_d2.begin());
  }
  return offsets;
}

}  // namespace

double CoocMatrix::sum() const { return std::accumulate(values.begin(), values.end(), 0.0); }
double Histogram::sum() const { return std::accumulate(counts.begin(), counts.end(), 0.0); }

PmiMatrix PmiMatrix::scaled(double factor) const {
  PmiMatrix out = *this;
  for (auto& v : out.values) v *= factor;
  return out;
}

PmiMatrix PmiMatrix::identity(int dim) {
  PmiMatrix m{dim, 0.0, std::vector<double>(static_cast<std::size_t>(dim) * dim, 0.0)};
  for (int a = 0; a < dim; ++a) m.values[static_cast<std::size_t>(a) * dim + a] = 1.0;
  return m;
}

PmiMatrix PmiMatrix::ones(int dim) {
  return {dim, 0.0, std::vector<double>(static_cast<std::size_t>(dim) * dim, 1.0)};
}

CoocStats collect_labels(const std::vector<int>& labels, int width, int height, int dim,
                         double sigma, int window, const RegionMask* mask) {
  if (sigma < 0.0) throw Error("collect: sigma must be >= 0");
  if (window < 0) throw Error("collect: window must be >= 0");
  if (dim < 1) throw Error("collect: dimension must be >= 1");
  if (labels.size() != static_cast<std::size_t>(width) * height) {
    throw DimensionMismatch("collect: label count does not match image size");
  }
  if (mask && (mask->width != width || mask->height != height)) {
    throw DimensionMismatch("collect: mask is " + std::to_string(mask->width) + "x" +
                            std::to_string(mask->height) + ", image is " + std::to_string(width) +
                            "x" + std::to_string(height));
  }

  auto inside = [&](std::size_t i) { return mask == nullptr || mask->inside[i] != 0; };
  const std::size_t cells = static_cast<std::size_t>(dim) * dim;

  CoocStats stats;
  stats.hist.counts.assign(dim, 0.0);
  std::vector<std::uint64_t> hist(dim, 0);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || labels[i] >= dim) throw Error("collect: label out of range");
    if (inside(i)) ++hist[labels[i]];
  }

  std::vector<int> class_d2;
  const std::vector<Offset> offsets = sigma > 0.0 ? half_window(window, class_d2) : std::vector<Offset>{};
  const std::size_t classes = class_d2.size();

  const int workers = worker_count();
  std::vector<std::vector<std::uint64_t>> pair_counts(workers);
  if (!offsets.empty()) {
    parallel_chunks(height, 16, workers, [&](int worker, int y0, int y1) {
      auto& counts = pair_counts[worker];
      if (counts.empty()) counts.assign(classes * cells, 0);
      for (int y = y0; y < y1; ++y) {
        for (int x = 0; x < width; ++x) {
          const std::size_t p = static_cast<std::size_t>(y) * width + x;
          if (!inside(p)) continue;
          const std::size_t row = static_cast<std::size_t>(labels[p]) * dim;
          for (const Offset& o : offsets) {
            const int qx = x + o.dx;
            const int qy = y + o.dy;
            if (qx < 0 || qx >= width || qy >= height) continue;
            const std::size_t q = static_cast<std::size_t>(qy) * width + qx;
            if (!inside(q)) continue;
            ++counts[o.distance_class * cells + row + labels[q]];
          }
        }
      }
    });
  }

  // Integer merge: exact, so the worker split cannot change the result.
  std::vector<std::uint64_t> merged(classes * cells, 0);
  for (const auto& counts : pair_counts) {
    if (counts.empty()) continue;
    for (std::size_t i = 0; i < merged.size(); ++i) merged[i] += counts[i];
  }

  CoocMatrix& c = stats.cooc;
  c.dim = dim;
  c.sigma = sigma;
  c.window = window;
  c.values.assign(cells, 0.0);
  for (int a = 0; a < dim; ++a) {
    stats.hist.counts[a] = static_cast<double>(hist[a]);
    c.values[static_cast<std::size_t>(a) * dim + a] = static_cast<double>(hist[a]);
  }
  for (std::size_t cls = 0; cls < classes; ++cls) {
    const double w = std::exp(-static_cast<double>(class_d2[cls]) / (2.0 * sigma * sigma));
    if (w == 0.0) continue;
    const std::uint64_t* n = merged.data() + cls * cells;
    for (int a = 0; a < dim; ++a) {
      for (int b = 0; b < dim; ++b) {
        const std::uint64_t both = n[static_cast<std::size_t>(a) * dim + b] +
                                   n[static_cast<std::size_t>(b) * dim + a];
        if (both != 0) c.values[static_cast<std::size_t>(a) * dim + b] += w * static_cast<double>(both);
      }
    }
  }
  return stats;
}

CoocStats collect_gray(const GrayImage& img, double sigma, int window, const RegionMask* mask) {
  return collect_labels(gray_levels(img), img.width, img.height, 256, sigma, window, mask);
}

CoocStats collect_hard(const GuidanceImage& guide, double sigma, int window,
                       const RegionMask* mask) {
  return collect_labels(guide.labels, guide.width, guide.height, guide.k, sigma, window, mask);
}

CoocMatrix hard_to_soft(const CoocMatrix& hard, const AffinityMatrix& K) {
  const int k = hard.dim;
  if (K.k != k) throw DimensionMismatch("hard_to_soft: affinity is " + std::to_string(K.k) +
                                        "x" + std::to_string(K.k) + ", matrix is " +
                                        std::to_string(k) + "x" + std::to_string(k));
  const auto idx = [k](int r, int c) { return static_cast<std::size_t>(r) * k + c; };

  // tmp = C * K^T
  std::vector<double> tmp(static_cast<std::size_t>(k) * k, 0.0);
  for (int r = 0; r < k; ++r) {
    for (int b = 0; b < k; ++b) {
      double acc = 0.0;
      for (int j = 0; j < k; ++j) acc += hard.values[idx(r, j)] * K.values[idx(b, j)];
      tmp[idx(r, b)] = acc;
    }
  }
  CoocMatrix soft{k, hard.sigma, hard.window, std::vector<double>(static_cast<std::size_t>(k) * k)};
  // Upper triangle of K * tmp, mirrored so the output is exactly symmetric.
  for (int a = 0; a < k; ++a) {
    for (int b = a; b < k; ++b) {
      double acc = 0.0;
      for (int i = 0; i < k; ++i) acc += K.values[idx(a, i)] * tmp[idx(i, b)];
      soft.values[idx(a, b)] = acc;
      soft.values[idx(b, a)] = acc;
    }
  }
  return soft;
}

Histogram soft_histogram(const Histogram& hard, const AffinityMatrix& K) {
  const int k = hard.dim();
  if (K.k != k) throw DimensionMismatch("soft_histogram: affinity and histogram sizes differ");
  Histogram out;
  out.counts.assign(k, 0.0);
  for (int a = 0; a < k; ++a) {
    for (int j = 0; j < k; ++j) out.counts[a] += K.at(a, j) * hard.counts[j];
  }
  return out;
}

CoocMatrix brute_soft(const LabImage& img, const GuidanceImage& guide, const Palette& palette,
                      double sigma_r, double sigma, int window) {
  if (img.width != guide.width || img.height != guide.height) {
    throw DimensionMismatch("brute_soft: image and guidance sizes differ");
  }
  const AffinityMatrix K = cluster_affinity(palette, sigma_r);
  const int k = palette.k();
  CoocMatrix out{k, sigma, window, std::vector<double>(static_cast<std::size_t>(k) * k, 0.0)};
  for (int py = 0; py < img.height; ++py) {
    for (int px = 0; px < img.width; ++px) {
      const int tp = guide.at(px, py);
      for (int qy = std::max(0, py - window); qy <= std::min(img.height - 1, py + window); ++qy) {
        for (int qx = std::max(0, px - window); qx <= std::min(img.width - 1, px + window); ++qx) {
          const double d2 = static_cast<double>((px - qx) * (px - qx) + (py - qy) * (py - qy));
          double w = 1.0;
          if (d2 > 0.0) w = sigma > 0.0 ? std::exp(-d2 / (2.0 * sigma * sigma)) : 0.0;
          if (w == 0.0) continue;
          const int tq = guide.at(qx, qy);
          for (int a = 0; a < k; ++a) {
            const double pa = w * K.at(a, tp);
            for (int b = 0; b < k; ++b) out.values[static_cast<std::size_t>(a) * k + b] += pa * K.at(b, tq);
          }
        }
      }
    }
  }
  return out;
}

PmiMatrix normalize_pmi(const CoocMatrix& c, const Histogram& h, double epsilon) {
  if (c.dim != h.dim()) throw DimensionMismatch("normalize_pmi: matrix and histogram sizes differ");
  if (epsilon < 0.0) throw Error("normalize_pmi: epsilon must be >= 0");
  const double c_total = c.sum();
  const double h_total = h.sum();
  if (!(c_total > 0.0) || !(h_total > 0.0)) {
    throw Error("normalize_pmi: no co-occurrence statistics were collected");
  }
  const int dim = c.dim;
  PmiMatrix m{dim, epsilon, std::vector<double>(static_cast<std::size_t>(dim) * dim, 0.0)};
  for (int a = 0; a < dim; ++a) {
    const double ha = h.counts[a] / h_total;
    for (int b = 0; b < dim; ++b) {
      const double num = c.at(a, b) / c_total;
      const double den = ha * (h.counts[b] / h_total) + epsilon;
      m.values[static_cast<std::size_t>(a) * dim + b] = den > 0.0 ? num / den : 0.0;
    }
  }
  return m;
}

}  // namespace cofkit
