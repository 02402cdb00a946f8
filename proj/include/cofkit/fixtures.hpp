#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cofkit/image.hpp"

namespace cofkit {

/// Synthetic test images.
///
///   two-region-checkerboard  left and right halves, each a checkerboard of
///                            its own two gray levels (cell size 4); the
///                            boundary sits at x = width / 2
///   ramp                     gray level round(255 x / (width - 1)) per column
///   step-stripes             vertical stripes cycling through three levels
///   star-field               bright 3x3 stars scattered on a dark background
///
/// Additive Gaussian noise of `noise_sigma` is clamped to [0,1]. Output is a
/// deterministic function of the arguments.
ColorImage make_fixture(const std::string& name, int width, int height, double noise_sigma = 0.0,
                        std::uint64_t seed = 1);

const std::vector<std::string>& fixture_names();

/// Levels used by the two-region checkerboard: {left_a, left_b, right_a, right_b}.
inline constexpr double kCheckerLevels[4] = {0.15, 0.40, 0.60, 0.85};
inline constexpr int kCheckerCell = 4;

}  // namespace cofkit
