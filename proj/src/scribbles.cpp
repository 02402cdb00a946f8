#include "cofkit/scribbles.hpp"

#include <algorithm>

namespace cofkit {

std::size_t ScribbleSet::count(Stroke s) const {
  return static_cast<std::size_t>(std::count(marks.begin(), marks.end(), s));
}

StrokeRuns encode_runs(const ScribbleSet& scribbles) {
  StrokeRuns runs;
  for (Stroke s : scribbles.marks) {
    const int v = static_cast<int>(s);
    if (!runs.empty() && runs.back().first == v) {
      ++runs.back().second;
    } else {
      runs.emplace_back(v, 1);
    }
  }
  return runs;
}

ScribbleSet decode_runs(int width, int height, const StrokeRuns& runs) {
  if (width < 0 || height < 0) throw Error("scribbles: negative dimensions");
  ScribbleSet out(width, height);
  std::size_t pos = 0;
  for (const auto& [value, length] : runs) {
    if (value < 0 || value > 2) throw Error("scribbles: stroke value must be 0, 1 or 2");
    if (length > out.marks.size() - pos) throw Error("scribbles: runs exceed the image size");
    std::fill_n(out.marks.begin() + static_cast<std::ptrdiff_t>(pos), length, static_cast<Stroke>(value));
    pos += length;
  }
  if (pos != out.marks.size()) throw Error("scribbles: runs do not cover the image");
  return out;
}

ScribbleSet scribbles_from_image(const ColorImage& img) {
  ScribbleSet out(img.width, img.height);
  for (std::size_t i = 0; i < img.pixel_count(); ++i) {
    const double* px = img.pixel(i);
    if (px[0] > 0.5 && px[1] < 0.5 && px[2] < 0.5) {
      out.marks[i] = Stroke::Foreground;
    } else if (px[2] > 0.5 && px[0] < 0.5 && px[1] < 0.5) {
      out.marks[i] = Stroke::Background;
    }
  }
  return out;
}

RegionMask propagate_scribbles(const ScribbleSet& scribbles, const GuidanceImage& guide,
                               const PmiMatrix& m_t, const FilterParams& params,
                               const PropagationOptions& options) {
  if (scribbles.width != guide.width || scribbles.height != guide.height) {
    throw DimensionMismatch("propagate_scribbles: scribbles and guidance sizes differ");
  }
  if (scribbles.count(Stroke::Foreground) == 0) {
    throw Error("propagate_scribbles: no foreground strokes");
  }
  if (options.rounds < 0) throw Error("propagate_scribbles: rounds must be >= 0");

  auto pin = [&](GrayImage& img) {
    for (std::size_t i = 0; i < img.data.size(); ++i) {
      if (scribbles.marks[i] == Stroke::Foreground) img.data[i] = 1.0;
      if (scribbles.marks[i] == Stroke::Background) img.data[i] = 0.0;
    }
  };

  GrayImage level(scribbles.width, scribbles.height, 0.0);
  pin(level);
  for (int round = 0; round < options.rounds; ++round) {
    level = guided_cof(level, guide, m_t, params);
    pin(level);
  }

  const double top = *std::max_element(level.data.begin(), level.data.end());
  RegionMask mask(scribbles.width, scribbles.height, false);
  for (std::size_t i = 0; i < level.data.size(); ++i) {
    bool in = level.data[i] >= options.threshold * top;
    if (scribbles.marks[i] == Stroke::Foreground) in = true;
    if (scribbles.marks[i] == Stroke::Background) in = false;
    mask.inside[i] = in ? 1 : 0;
  }
  return mask;
}

}  // namespace cofkit
