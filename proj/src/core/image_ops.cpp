#include "fewshot/core/image_ops.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace fewshot {

PixelBox snap_box(double x_min, double y_min, double x_max, double y_max, int width, int height) {
  PixelBox b;
  b.x0 = std::clamp(static_cast<int>(std::floor(x_min)), 0, width);
  b.y0 = std::clamp(static_cast<int>(std::floor(y_min)), 0, height);
  b.x1 = std::clamp(static_cast<int>(std::ceil(x_max)), 0, width);
  b.y1 = std::clamp(static_cast<int>(std::ceil(y_max)), 0, height);
  return b;
}

Tensor resize_bilinear(const Tensor& image, int out_h, int out_w) {
  if (image.ndim() != 3) throw std::invalid_argument("resize_bilinear expects a (C,H,W) tensor");
  if (out_h <= 0 || out_w <= 0) throw std::invalid_argument("resize target must be positive");
  const int channels = image.dim(0);
  const int in_h = image.dim(1);
  const int in_w = image.dim(2);
  if (in_h == out_h && in_w == out_w) return image;

  Tensor out({channels, out_h, out_w});
  const double scale_y = static_cast<double>(in_h) / out_h;
  const double scale_x = static_cast<double>(in_w) / out_w;
  for (int y = 0; y < out_h; ++y) {
    double sy = (y + 0.5) * scale_y - 0.5;
    sy = std::clamp(sy, 0.0, static_cast<double>(in_h - 1));
    const int y0 = static_cast<int>(sy);
    const int y1 = std::min(y0 + 1, in_h - 1);
    const double fy = sy - y0;
    for (int x = 0; x < out_w; ++x) {
      double sx = (x + 0.5) * scale_x - 0.5;
      sx = std::clamp(sx, 0.0, static_cast<double>(in_w - 1));
      const int x0 = static_cast<int>(sx);
      const int x1 = std::min(x0 + 1, in_w - 1);
      const double fx = sx - x0;
      for (int c = 0; c < channels; ++c) {
        const double top = image.at(c, y0, x0) * (1.0 - fx) + image.at(c, y0, x1) * fx;
        const double bot = image.at(c, y1, x0) * (1.0 - fx) + image.at(c, y1, x1) * fx;
        out.at(c, y, x) = top * (1.0 - fy) + bot * fy;
      }
    }
  }
  return out;
}

Tensor crop(const Tensor& image, const PixelBox& box) {
  if (image.ndim() != 3) throw std::invalid_argument("crop expects a (C,H,W) tensor");
  if (box.empty() || box.x0 < 0 || box.y0 < 0 || box.x1 > image.dim(2) || box.y1 > image.dim(1)) {
    throw std::invalid_argument("crop box out of bounds");
  }
  Tensor out({image.dim(0), box.height(), box.width()});
  for (int c = 0; c < image.dim(0); ++c) {
    for (int y = box.y0; y < box.y1; ++y) {
      for (int x = box.x0; x < box.x1; ++x) {
        out.at(c, y - box.y0, x - box.x0) = image.at(c, y, x);
      }
    }
  }
  return out;
}

void paste(Tensor& target, const Tensor& patch, const PixelBox& box, int feather_width) {
  if (target.ndim() != 3 || patch.ndim() != 3) throw std::invalid_argument("paste expects (C,H,W) tensors");
  if (patch.dim(0) != target.dim(0) || patch.dim(1) != box.height() || patch.dim(2) != box.width()) {
    throw std::invalid_argument("paste patch shape does not match box");
  }
  if (box.x0 < 0 || box.y0 < 0 || box.x1 > target.dim(2) || box.y1 > target.dim(1)) {
    throw std::invalid_argument("paste box out of bounds");
  }
  for (int y = 0; y < box.height(); ++y) {
    for (int x = 0; x < box.width(); ++x) {
      double alpha = 1.0;
      if (feather_width > 0) {
        const int edge = std::min(std::min(x, box.width() - 1 - x), std::min(y, box.height() - 1 - y));
        alpha = std::min(1.0, (edge + 1.0) / (feather_width + 1.0));
      }
      for (int c = 0; c < target.dim(0); ++c) {
        double& t = target.at(c, box.y0 + y, box.x0 + x);
        t = alpha * patch.at(c, y, x) + (1.0 - alpha) * t;
      }
    }
  }
}

void require_unit_range(const Tensor& image, const char* what) {
  constexpr double kSlack = 1e-9;
  for (std::size_t i = 0; i < image.size(); ++i) {
    const double v = image[i];
    if (!(v >= -1.0 - kSlack && v <= 1.0 + kSlack)) {
      throw std::invalid_argument(std::string(what) + ": pixel values must lie in [-1, 1]");
    }
  }
}

}  // namespace fewshot
