#include "fewshot/core/imageio.hpp"

#include <opencv2/imgcodecs.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fewshot/core/errors.hpp"

namespace fewshot {

Tensor load_image(const std::filesystem::path& path) {
  cv::Mat bgr = cv::imread(path.string(), cv::IMREAD_COLOR);
  if (bgr.empty()) {
    throw InputError("cannot read image: " + path.string());
  }
  Tensor out({3, bgr.rows, bgr.cols});
  for (int y = 0; y < bgr.rows; ++y) {
    const auto* row = bgr.ptr<cv::Vec3b>(y);
    for (int x = 0; x < bgr.cols; ++x) {
      // OpenCV stores BGR; tensor channels are RGB.
      out.at(0, y, x) = row[x][2] / 127.5 - 1.0;
      out.at(1, y, x) = row[x][1] / 127.5 - 1.0;
      out.at(2, y, x) = row[x][0] / 127.5 - 1.0;
    }
  }
  return out;
}

void save_image(const std::filesystem::path& path, const Tensor& image) {
  if (image.ndim() != 3 || image.dim(0) != 3) {
    throw std::invalid_argument("save_image expects a (3,H,W) tensor");
  }
  const int h = image.dim(1);
  const int w = image.dim(2);
  cv::Mat bgr(h, w, CV_8UC3);
  auto to_byte = [](double v) {
    const double q = std::round((std::clamp(v, -1.0, 1.0) + 1.0) * 127.5);
    return static_cast<unsigned char>(std::clamp(q, 0.0, 255.0));
  };
  for (int y = 0; y < h; ++y) {
    auto* row = bgr.ptr<cv::Vec3b>(y);
    for (int x = 0; x < w; ++x) {
      row[x][2] = to_byte(image.at(0, y, x));
      row[x][1] = to_byte(image.at(1, y, x));
      row[x][0] = to_byte(image.at(2, y, x));
    }
  }
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  if (!cv::imwrite(path.string(), bgr)) {
    throw std::runtime_error("cannot write image: " + path.string());
  }
}

}  // namespace fewshot
