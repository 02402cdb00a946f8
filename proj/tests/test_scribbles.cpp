#include <doctest.h>

#include "cofkit/fixtures.hpp"
#include "cofkit/scribbles.hpp"
#include "reference.hpp"

using namespace cofkit;
using namespace cofkit::testing;

TEST_CASE("stroke runs round trip on random rasters") {
  auto& rng = rng_for(61);
  for (int trial = 0; trial < 100; ++trial) {
    const int w = 1 + static_cast<int>(rng() % 40);
    const int h = 1 + static_cast<int>(rng() % 40);
    ScribbleSet s(w, h);
    // Mix long runs and isolated marks.
    const bool sparse = trial % 2 == 0;
    for (auto& m : s.marks) {
      const auto r = rng() % 100;
      if (sparse) {
        m = r < 90 ? Stroke::None : (r < 95 ? Stroke::Foreground : Stroke::Background);
      } else {
        m = static_cast<Stroke>(r % 3);
      }
    }
    const StrokeRuns runs = encode_runs(s);
    std::size_t total = 0;
    for (std::size_t i = 0; i < runs.size(); ++i) {
      total += runs[i].second;
      CHECK(runs[i].second > 0);
      if (i > 0) CHECK(runs[i].first != runs[i - 1].first);
    }
    CHECK(total == s.marks.size());
    CHECK(decode_runs(w, h, runs) == s);
  }
  CHECK(encode_runs(ScribbleSet(0, 0)).empty());
  CHECK(decode_runs(0, 0, {}) == ScribbleSet(0, 0));
}

TEST_CASE("decode_runs rejects malformed input") {
  CHECK_THROWS(decode_runs(2, 2, {{0, 3}}));
  CHECK_THROWS(decode_runs(2, 2, {{0, 5}}));
  CHECK_THROWS(decode_runs(2, 2, {{3, 4}}));
  CHECK_THROWS(decode_runs(2, 2, {{-1, 4}}));
  CHECK_THROWS(decode_runs(-1, 2, {}));
  CHECK_NOTHROW(decode_runs(2, 2, {{1, 2}, {0, 0}, {2, 2}}));
}

TEST_CASE("scribbles from a color overlay") {
  ColorImage img(3, 1, 0.5);
  img.data = {1, 0, 0, 0, 0, 1, 0.9, 0.9, 0.9};
  const ScribbleSet s = scribbles_from_image(img);
  CHECK(s.at(0, 0) == Stroke::Foreground);
  CHECK(s.at(1, 0) == Stroke::Background);
  CHECK(s.at(2, 0) == Stroke::None);
}

TEST_CASE("propagate_scribbles limits") {
  auto& rng = rng_for(62);
  const GuidanceImage g = random_guide(12, 10, 4, rng);
  ScribbleSet s(12, 10);
  s.set(3, 3, Stroke::Foreground);
  s.set(4, 3, Stroke::Foreground);
  s.set(9, 8, Stroke::Background);
  FilterParams p;
  p.window = 2;
  p.sigma_s = 1.5;

  const RegionMask only = propagate_scribbles(s, g, PmiMatrix{4, 0.0, std::vector<double>(16, 0.0)}, p);
  CHECK(only.count() == 2);
  // Diagonal M with a guide of distinct labels: no mixing at all.
  GuidanceImage distinct{12, 10, 120, {}};
  for (int i = 0; i < 120; ++i) distinct.labels.push_back(i);
  const RegionMask diag = propagate_scribbles(s, distinct, PmiMatrix::identity(120), p);
  CHECK(diag.count() == 2);
  CHECK(diag.at(3, 3));
  CHECK(diag.at(4, 3));

  PropagationOptions all;
  all.threshold = 0.0;
  const RegionMask whole = propagate_scribbles(s, g, PmiMatrix::ones(4), p, all);
  CHECK(whole.count() == 12 * 10 - 1);  // background strokes stay out
  ScribbleSet fg_only(12, 10);
  fg_only.set(0, 0, Stroke::Foreground);
  CHECK(propagate_scribbles(fg_only, g, PmiMatrix::ones(4), p, all).count() == 120);

  CHECK_THROWS(propagate_scribbles(ScribbleSet(12, 10), g, PmiMatrix::ones(4), p));
  ScribbleSet bg_only(12, 10);
  bg_only.set(1, 1, Stroke::Background);
  CHECK_THROWS(propagate_scribbles(bg_only, g, PmiMatrix::ones(4), p));
  CHECK_THROWS_AS(propagate_scribbles(ScribbleSet(5, 5), g, PmiMatrix::ones(4), p), DimensionMismatch);
}

TEST_CASE("fixtures") {
  SUBCASE("ramp spans every gray level") {
    const ColorImage ramp = make_fixture("ramp", 256, 3);
    for (int x = 0; x < 256; ++x)
      for (int y = 0; y < 3; ++y)
        for (int c = 0; c < 3; ++c) CHECK(to_level(ramp.at(x, y, c)) == x);
  }
  SUBCASE("noiseless checkerboard has two levels per half") {
    const ColorImage img = make_fixture("two-region-checkerboard", 32, 16);
    for (int y = 0; y < 16; ++y)
      for (int x = 0; x < 32; ++x) {
        const double v = img.at(x, y);
        if (x < 16) {
          CHECK((v == kCheckerLevels[0] || v == kCheckerLevels[1]));
        } else {
          CHECK((v == kCheckerLevels[2] || v == kCheckerLevels[3]));
        }
      }
    CHECK(img.at(0, 0) != img.at(kCheckerCell, 0));
    CHECK(img.at(0, 0) == img.at(kCheckerCell, kCheckerCell));
  }
  SUBCASE("stripes and stars") {
    const ColorImage st = make_fixture("step-stripes", 48, 4);
    CHECK(st.at(0, 0) == 0.2);
    CHECK(st.at(6, 0) == 0.5);
    CHECK(st.at(12, 0) == 0.8);
    CHECK(st.at(18, 0) == 0.2);
    const ColorImage sf = make_fixture("star-field", 40, 40, 0.0, 3);
    std::size_t bright = 0;
    for (std::size_t i = 0; i < sf.pixel_count(); ++i) bright += sf.pixel(i)[0] == 0.95;
    CHECK(bright > 0);
    CHECK(bright <= 8 * 9);
  }
  SUBCASE("seeded noise is deterministic") {
    for (const auto& name : fixture_names()) {
      const ColorImage a = make_fixture(name, 30, 20, 0.1, 9);
      CHECK(a == make_fixture(name, 30, 20, 0.1, 9));
      CHECK(!(a == make_fixture(name, 30, 20, 0.1, 10)));
      for (double v : a.data) CHECK((v >= 0.0 && v <= 1.0));
      for (std::size_t i = 0; i < a.pixel_count(); ++i) {
        CHECK(a.pixel(i)[0] == a.pixel(i)[1]);
        CHECK(a.pixel(i)[1] == a.pixel(i)[2]);
      }
    }
  }
  SUBCASE("errors") {
    CHECK_THROWS(make_fixture("nope", 4, 4));
    CHECK_THROWS(make_fixture("ramp", 0, 4));
    CHECK_THROWS(make_fixture("ramp", 4, 4, -0.1));
  }
}
