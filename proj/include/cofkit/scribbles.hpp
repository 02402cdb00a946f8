#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "cofkit/cooc.hpp"
#include "cofkit/filter.hpp"
#include "cofkit/image.hpp"

namespace cofkit {

enum class Stroke : std::uint8_t { None = 0, Foreground = 1, Background = 2 };

/// Tri-state user strokes over an image.
struct ScribbleSet {
  int width = 0;
  int height = 0;
  std::vector<Stroke> marks;

  ScribbleSet() = default;
  ScribbleSet(int w, int h) : width(w), height(h), marks(static_cast<std::size_t>(w) * h, Stroke::None) {}

  Stroke at(int x, int y) const { return marks[static_cast<std::size_t>(y) * width + x]; }
  void set(int x, int y, Stroke s) { marks[static_cast<std::size_t>(y) * width + x] = s; }
  std::size_t count(Stroke s) const;

  friend bool operator==(const ScribbleSet&, const ScribbleSet&) = default;
};

/// Run-length form: (stroke value, run length) pairs in row-major order.
using StrokeRuns = std::vector<std::pair<int, std::size_t>>;

StrokeRuns encode_runs(const ScribbleSet& scribbles);
/// Throws when the runs do not cover exactly width*height pixels or carry an
/// unknown stroke value.
ScribbleSet decode_runs(int width, int height, const StrokeRuns& runs);

/// Reads strokes from a color image: red pixels are foreground, blue pixels
/// are background, everything else is unmarked.
ScribbleSet scribbles_from_image(const ColorImage& img);

struct PropagationOptions {
  /// Mask keeps pixels with L >= threshold * max(L).
  double threshold = 0.5;
  int rounds = 5;
};

/// Grows the foreground strokes into a mask: S (1 on foreground strokes, 0
/// elsewhere) is filtered `rounds` times with guided_cof under M_T, stroke
/// pixels being reset to their known value after every round, then
/// thresholded. Foreground strokes always end up inside the mask and
/// background strokes outside it. Throws when there is no foreground stroke.
RegionMask propagate_scribbles(const ScribbleSet& scribbles, const GuidanceImage& guide,
                               const PmiMatrix& m_t, const FilterParams& params,
                               const PropagationOptions& options = {});

}  // namespace cofkit
