#include <doctest.h>

#include "cofkit/color.hpp"
#include "cofkit/filter.hpp"
#include "reference.hpp"

using namespace cofkit;
using namespace cofkit::testing;

namespace {

FilterParams small_params(int window = 2, double sigma_s = 1.3) {
  FilterParams p;
  p.window = window;
  p.sigma_s = sigma_s;
  return p;
}

template <typename Image>
void check_in_window_range(const Image& in, const Image& out, int window) {
  for (int y = 0; y < in.height; ++y)
    for (int x = 0; x < in.width; ++x)
      for (int c = 0; c < Image::kChannels; ++c) {
        double lo = 1e300, hi = -1e300;
        for (int qy = std::max(0, y - window); qy <= std::min(in.height - 1, y + window); ++qy)
          for (int qx = std::max(0, x - window); qx <= std::min(in.width - 1, x + window); ++qx) {
            lo = std::min(lo, in.at(qx, qy, c));
            hi = std::max(hi, in.at(qx, qy, c));
          }
        CHECK(out.at(x, y, c) >= lo - 1e-12);
        CHECK(out.at(x, y, c) <= hi + 1e-12);
      }
}

}  // namespace

TEST_CASE("spatial kernel") {
  const SpatialKernel k(3, 1.5);
  CHECK(k.at(0, 0) == 1.0);
  for (int dy = -3; dy <= 3; ++dy)
    for (int dx = -3; dx <= 3; ++dx) {
      CHECK(k.at(dx, dy) > 0.0);
      CHECK(k.at(dx, dy) <= 1.0);
      CHECK(k.at(dx, dy) == k.at(-dy, dx));
      CHECK(k.at(dx, dy) == k.at(-dx, dy));
    }
  CHECK_THROWS(SpatialKernel(-1, 1.0));
  CHECK_THROWS(SpatialKernel(1, 0.0));
  CHECK(default_sigma_s() * default_sigma_s() == doctest::Approx(2 * std::sqrt(15.0) + 1).epsilon(1e-15));
}

TEST_CASE("gaussian_filter") {
  const GrayImage flat(9, 7, 0.3);
  CHECK(max_abs_diff(gaussian_filter(flat, FilterParams{}), flat) < 1e-15);

  GrayImage delta(11, 11, 0.0);
  delta.at(5, 5) = 1.0;
  const FilterParams p = small_params(2, 1.1);
  const GrayImage out = gaussian_filter(delta, p);
  const SpatialKernel k(2, 1.1);
  // Each output pixel normalizes by its own (full) window sum.
  double total = 0.0;
  for (double w : k.weights) total += w;
  for (int dy = -2; dy <= 2; ++dy)
    for (int dx = -2; dx <= 2; ++dx) CHECK(out.at(5 + dx, 5 + dy) == doctest::Approx(k.at(dx, dy) / total).epsilon(1e-14));
  CHECK(out.at(5 + 3, 5) == 0.0);

  auto& rng = rng_for(51);
  for (int trial = 0; trial < 10; ++trial) {
    const ColorImage img = random_image<ColorImage>(8, 8, rng);
    const ColorImage ref = naive_filter(img, 3, 1.7, [](int, int) { return 1.0; });
    CHECK(max_abs_diff(gaussian_filter(img, small_params(3, 1.7)), ref) < 1e-12);
  }
}

TEST_CASE("bilateral") {
  auto& rng = rng_for(52);
  const ColorImage img = random_image<ColorImage>(10, 9, rng);
  FilterParams p = small_params(3, 2.0);
  p.sigma_r = 1e12;
  CHECK(max_abs_diff(bilateral(img, p), gaussian_filter(img, p)) < 1e-9);

  GrayImage two(10, 6);
  for (int y = 0; y < 6; ++y)
    for (int x = 0; x < 10; ++x) two.at(x, y) = x < 5 ? 0.2 : 0.8;
  p.sigma_r = 1e-3;
  CHECK(max_abs_diff(bilateral(two, p), two) < 1e-6);

  p.sigma_r = 0.0;
  CHECK_THROWS(bilateral(two, p));

  for (int trial = 0; trial < 10; ++trial) {
    const GrayImage g = random_image<GrayImage>(8, 8, rng);
    const double sr = 0.05 + 0.3 * uniform(rng);
    FilterParams q = small_params(2, 1.4);
    q.sigma_r = sr;
    const GrayImage ref = naive_filter(g, 2, 1.4, [&](int pi, int qi) {
      const double d = g.data[pi] - g.data[qi];
      return std::exp(-d * d / (2 * sr * sr));
    });
    const GrayImage out = bilateral(g, q);
    CHECK(max_abs_diff(out, ref) < 1e-12);
    check_in_window_range(g, out, 2);
  }
}

TEST_CASE("cof_gray limits and hand evaluation") {
  auto& rng = rng_for(53);
  const GrayImage img = random_levels(12, 12, 256, rng);
  const FilterParams p = small_params(3, 2.0);
  // Repeated levels in a window average equal values, so allow rounding.
  CHECK(max_abs_diff(cof_gray(img, PmiMatrix::identity(256), p), img) < 1e-15);
  CHECK(max_abs_diff(cof_gray(img, PmiMatrix::ones(256), p), gaussian_filter(img, p)) < 1e-9);

  GrayImage row(3, 1);
  row.data = {0.0, 128.0 / 255.0, 1.0};
  PmiMatrix m{256, 0.0, std::vector<double>(256 * 256, 0.0)};
  auto set = [&](int a, int b, double v) { m.values[a * 256 + b] = m.values[b * 256 + a] = v; };
  set(0, 0, 1.0);
  set(128, 128, 1.0);
  set(255, 255, 1.0);
  set(0, 128, 0.5);
  set(128, 255, 0.5);
  set(0, 255, 0.25);
  const GrayImage out = cof_gray(row, m, small_params(1, 1.0));
  const double g = std::exp(-0.5);
  const double v1 = 128.0 / 255.0;
  CHECK(out.data[0] == doctest::Approx(0.5 * g * v1 / (1 + 0.5 * g)).epsilon(1e-14));
  CHECK(out.data[1] == doctest::Approx((v1 + 0.5 * g) / (1 + g)).epsilon(1e-14));
  CHECK(out.data[2] == doctest::Approx((0.5 * g * v1 + 1.0) / (1 + 0.5 * g)).epsilon(1e-14));

  CHECK_THROWS_AS(cof_gray(row, PmiMatrix::ones(4), p), DimensionMismatch);
}

TEST_CASE("zero range weights copy the input pixel") {
  GrayImage img(3, 1);
  img.data = {0.0, 0.5, 1.0};
  PmiMatrix m{256, 0.0, std::vector<double>(256 * 256, 0.0)};
  m.values[0] = 1.0;  // only level 0 has weight
  const GrayImage out = cof_gray(img, m, small_params(1, 1.0));
  CHECK(out.data == img.data);
}

TEST_CASE("guided_cof") {
  auto& rng = rng_for(54);
  SUBCASE("diagonal M with distinct labels per window is the identity") {
    const ColorImage img = random_image<ColorImage>(6, 6, rng);
    GuidanceImage g{6, 6, 36, {}};
    for (int i = 0; i < 36; ++i) g.labels.push_back(i);
    CHECK(guided_cof(img, g, PmiMatrix::identity(36), small_params(2, 1.5)) == img);
  }
  SUBCASE("all-ones M is the Gaussian filter") {
    const ColorImage img = random_image<ColorImage>(9, 7, rng);
    const GuidanceImage g = random_guide(9, 7, 5, rng);
    const FilterParams p = small_params(3, 2.2);
    CHECK(max_abs_diff(guided_cof(img, g, PmiMatrix::ones(5), p), gaussian_filter(img, p)) < 1e-9);
  }
  SUBCASE("matches the direct weighted sum") {
    for (int trial = 0; trial < 10; ++trial) {
      const ColorImage img = random_image<ColorImage>(8, 8, rng);
      const GuidanceImage g = random_guide(8, 8, 3, rng);
      const PmiMatrix m = random_pmi(3, rng);
      const ColorImage ref = naive_filter(img, 2, 1.3, [&](int p, int q) { return m.at(g.labels[p], g.labels[q]); });
      const ColorImage out = guided_cof(img, g, m, small_params());
      CHECK(max_abs_diff(out, ref) < 1e-12);
      check_in_window_range(img, out, 2);
    }
  }
  SUBCASE("scale invariance is bit exact") {
    const ColorImage img = random_image<ColorImage>(16, 12, rng);
    const GuidanceImage g = random_guide(16, 12, 6, rng);
    PmiMatrix m{6, 0.0, std::vector<double>(36)};
    for (int a = 0; a < 6; ++a)
      for (int b = a; b < 6; ++b) m.values[a * 6 + b] = m.values[b * 6 + a] = 1e-3 + 50.0 * uniform(rng);
    const ColorImage base = guided_cof(img, g, m, FilterParams{});
    for (double c : {1e-3, 1.0, 3.7, 1e3}) CHECK(guided_cof(img, g, m.scaled(c), FilterParams{}) == base);
  }
  SUBCASE("errors") {
    const ColorImage img(4, 4);
    const GuidanceImage g = random_guide(4, 3, 2, rng);
    CHECK_THROWS_AS(guided_cof(img, g, PmiMatrix::ones(2), FilterParams{}), DimensionMismatch);
    const GuidanceImage ok = random_guide(4, 4, 2, rng);
    CHECK_THROWS_AS(guided_cof(img, ok, PmiMatrix::ones(3), FilterParams{}), DimensionMismatch);
    PmiMatrix bad = PmiMatrix::ones(2);
    bad.values[1] = -1.0;
    CHECK_THROWS(guided_cof(img, ok, bad, FilterParams{}));
    FilterParams neg;
    neg.window = -1;
    CHECK_THROWS(guided_cof(img, ok, PmiMatrix::ones(2), neg));
  }
}

TEST_CASE("iterate") {
  auto& rng = rng_for(55);
  const ColorImage img = random_image<ColorImage>(12, 10, rng);
  const GuidanceImage g = random_guide(12, 10, 4, rng);
  const GuidedModel model{Palette{}, g, random_pmi(4, rng)};
  int rebuilds = 0;
  const GuidedModel other{Palette{}, random_guide(12, 10, 4, rng), random_pmi(4, rng)};
  ModelBuilder builder = [&](const ColorImage&) {
    ++rebuilds;
    return other;
  };

  FilterParams p = small_params();
  p.iterations = 0;
  const IterationResult none = iterate(img, model, p, builder);
  CHECK(none.image == img);
  CHECK(none.msd.empty());

  p.iterations = 1;
  p.mode = IterationMode::Iterative;
  const IterationResult it1 = iterate(img, model, p, builder);
  p.mode = IterationMode::Rolling;
  const IterationResult ro1 = iterate(img, model, p, builder);
  CHECK(it1.image == ro1.image);
  CHECK(rebuilds == 0);
  REQUIRE(it1.msd.size() == 1);
  CHECK(it1.msd[0] == mse(it1.image, img));

  p.iterations = 4;
  const IterationResult ro4 = iterate(img, model, p, builder);
  CHECK(rebuilds == 3);
  CHECK(ro4.msd.size() == 4);
  p.mode = IterationMode::Iterative;
  const IterationResult it4 = iterate(img, model, p, builder);
  CHECK(rebuilds == 3);
  CHECK(!(it4.image == ro4.image));
  ColorImage manual = img;
  for (int i = 0; i < 4; ++i) {
    const ColorImage next = guided_cof(manual, g, model.pmi, p);
    CHECK(it4.msd[i] == mse(next, manual));
    manual = next;
  }
  CHECK(it4.image == manual);

  p.mode = IterationMode::Rolling;
  CHECK_THROWS(iterate(img, model, p));
}

TEST_CASE("fb_cof") {
  auto& rng = rng_for(56);
  const ColorImage img = random_image<ColorImage>(10, 8, rng);
  const GuidanceImage g = random_guide(10, 8, 4, rng);
  const PmiMatrix mf = random_pmi(4, rng);
  const PmiMatrix mb = random_pmi(4, rng);
  const PmiMatrix zero{4, 0.0, std::vector<double>(16, 0.0)};
  const FilterParams p = small_params();

  CHECK(fb_cof(img, g, mf, zero, p) == img);
  CHECK(max_abs_diff(fb_cof(img, g, zero, mb, p), guided_cof(img, g, mb, p)) < 1e-12);
  CHECK(fb_cof(img, g, zero, zero, p) == img);

  // Direct evaluation of sum G (M_F I_p + M_B I_q) / sum G (M_F + M_B).
  for (int trial = 0; trial < 5; ++trial) {
    const PmiMatrix f = random_pmi(4, rng);
    PmiMatrix b = random_pmi(4, rng);
    for (auto& v : b.values) v *= 0.5;  // keeps both tables float-exact under the shared scale
    const ColorImage out = fb_cof(img, g, f, b, p);
    for (int y = 0; y < img.height; ++y)
      for (int x = 0; x < img.width; ++x) {
        double num[3] = {}, den = 0;
        const int tp = g.at(x, y);
        for (int qy = std::max(0, y - 2); qy <= std::min(img.height - 1, y + 2); ++qy)
          for (int qx = std::max(0, x - 2); qx <= std::min(img.width - 1, x + 2); ++qx) {
            const double G = std::exp(-((x - qx) * (x - qx) + (y - qy) * (y - qy)) / (2 * 1.3 * 1.3));
            const double wf = G * f.at(tp, g.at(qx, qy));
            const double wb = G * b.at(tp, g.at(qx, qy));
            den += wf + wb;
            for (int c = 0; c < 3; ++c) num[c] += wf * img.at(x, y, c) + wb * img.at(qx, qy, c);
          }
        for (int c = 0; c < 3; ++c) CHECK(std::abs(out.at(x, y, c) - num[c] / den) < 1e-12);
      }
  }

  // 1-D toy with scalar matrices, window 1, sigma 1.
  ColorImage toy(2, 1);
  toy.data = {0.2, 0.2, 0.2, 0.6, 0.6, 0.6};
  const GuidanceImage one{2, 1, 1, {0, 0}};
  const PmiMatrix f{1, 0.0, {0.5}}, b{1, 0.0, {1.0}};
  const ColorImage out = fb_cof(toy, one, f, b, small_params(1, 1.0));
  const double G = std::exp(-0.5);
  const double j0 = (1.5 * 0.2 + G * (0.5 * 0.2 + 0.6)) / (1.5 * (1 + G));
  const double j1 = (1.5 * 0.6 + G * (0.5 * 0.6 + 0.2)) / (1.5 * (1 + G));
  CHECK(out.at(0, 0) == doctest::Approx(j0).epsilon(1e-14));
  CHECK(out.at(1, 0, 2) == doctest::Approx(j1).epsilon(1e-14));

  FilterParams flat = small_params(1, 1.0);
  flat.fb_spatial = false;
  const ColorImage no_g = fb_cof(toy, one, f, b, flat);
  CHECK(no_g.at(0, 0) == doctest::Approx((1.5 * 0.2 + 0.5 * 0.2 + 0.6) / 3.0).epsilon(1e-14));

  CHECK_THROWS_AS(fb_cof(img, g, mf, PmiMatrix::ones(3), p), DimensionMismatch);
}

TEST_CASE("selective_gray") {
  auto& rng = rng_for(57);
  const ColorImage img = random_image<ColorImage>(9, 9, rng);
  const GuidanceImage g = random_guide(9, 9, 3, rng);
  const PmiMatrix m = random_pmi(3, rng);
  const PmiMatrix zero{3, 0.0, std::vector<double>(9, 0.0)};
  const FilterParams p = small_params();
  const GrayImage gray = rgb_to_gray(img);

  CHECK(selective_gray(img, g, m, zero, p) == img);
  const ColorImage all_gray = selective_gray(img, g, zero, m, p);
  CHECK(max_abs_diff(all_gray, gray_to_color(gray)) < 1e-15);
  const ColorImage half = selective_gray(img, g, m, m, p);
  for (std::size_t i = 0; i < img.pixel_count(); ++i)
    for (int c = 0; c < 3; ++c) CHECK(std::abs(half.pixel(i)[c] - 0.5 * (img.pixel(i)[c] + gray.data[i])) < 1e-15);
  CHECK(selective_gray(img, g, zero, zero, p) == img);
}
