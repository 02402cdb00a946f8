#pragma once

#include "cofkit/image.hpp"

namespace cofkit {

/// sRGB (D65, standard transfer curve) to CIELAB.
LabImage rgb_to_lab(const ColorImage& img);

/// Single-pixel variant of rgb_to_lab; writes L, a, b into `lab`.
void srgb_to_lab(const double rgb[3], double lab[3]);

/// Rec. 601 luma: 0.299 R + 0.587 G + 0.114 B.
GrayImage rgb_to_gray(const ColorImage& img);

}  // namespace cofkit
