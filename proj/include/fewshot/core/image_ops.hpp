#pragma once

#include "fewshot/core/tensor.hpp"

namespace fewshot {

/// Integer pixel rectangle, half-open: columns [x0, x1), rows [y0, y1).
struct PixelBox {
  int x0 = 0;
  int y0 = 0;
  int x1 = 0;
  int y1 = 0;

  int width() const { return x1 - x0; }
  int height() const { return y1 - y0; }
  bool empty() const { return width() <= 0 || height() <= 0; }
  bool contains(int x, int y) const { return x >= x0 && x < x1 && y >= y0 && y < y1; }
  bool operator==(const PixelBox&) const = default;
};

/// Maps a real-valued box to pixels: floor on minima, ceil on maxima, then
/// clamp to [0,width]x[0,height]. The same rule maps boxes into latent grids.
PixelBox snap_box(double x_min, double y_min, double x_max, double y_max, int width, int height);

/// Bilinear resize of a (C,H,W) tensor with half-pixel-center sampling.
Tensor resize_bilinear(const Tensor& image, int out_h, int out_w);

/// Copy of the region `box` of a (C,H,W) tensor; box must lie inside.
Tensor crop(const Tensor& image, const PixelBox& box);

/// Writes `patch` over `target` at `box` (shapes must agree). With
/// feather_width > 0 the patch is alpha-blended in over a linear ramp that
/// rises from the box border; 0 is a hard paste.
void paste(Tensor& target, const Tensor& patch, const PixelBox& box, int feather_width = 0);

/// Throws std::invalid_argument unless every value lies in [-1, 1].
void require_unit_range(const Tensor& image, const char* what);

}  // namespace fewshot
