#pragma once

#include <filesystem>
#include <unordered_map>

#include "fewshot/core/tensor.hpp"
#include "fewshot/data/manifest.hpp"

namespace fewshot::train {

/// Source of model-ready image tensors for manifest records.
class ImageProvider {
 public:
  virtual ~ImageProvider() = default;
  virtual Tensor image(const data::ImageRecord& record) = 0;
};

/// Loads record paths relative to a root directory and resizes to the model
/// resolution. Decoded tensors are cached; desk-scale datasets fit easily.
class FileImageProvider : public ImageProvider {
 public:
  FileImageProvider(std::filesystem::path root, int image_size)
      : root_(std::move(root)), image_size_(image_size) {}

  Tensor image(const data::ImageRecord& record) override;

 private:
  std::filesystem::path root_;
  int image_size_;
  std::unordered_map<std::string, Tensor> cache_;
};

}  // namespace fewshot::train
