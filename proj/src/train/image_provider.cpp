#include "fewshot/train/image_provider.hpp"

#include "fewshot/core/image_ops.hpp"
#include "fewshot/core/imageio.hpp"

namespace fewshot::train {

Tensor FileImageProvider::image(const data::ImageRecord& record) {
  const auto it = cache_.find(record.path);
  if (it != cache_.end()) return it->second;
  Tensor t = resize_bilinear(load_image(root_ / record.path), image_size_, image_size_);
  cache_.emplace(record.path, t);
  return t;
}

}  // namespace fewshot::train
