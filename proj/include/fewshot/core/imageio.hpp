#pragma once

#include <filesystem>

#include "fewshot/core/tensor.hpp"

namespace fewshot {

/// Loads an image file into a (3,H,W) RGB tensor with values in [-1, 1].
/// Grayscale files are replicated across channels. Throws InputError on
/// missing or undecodable files.
Tensor load_image(const std::filesystem::path& path);

/// Writes a (3,H,W) tensor in [-1, 1] as an 8-bit image; the format follows
/// the file extension (.png is lossless and the default choice). Values are
/// clamped before quantization. Parent directories are created.
void save_image(const std::filesystem::path& path, const Tensor& image);

}  // namespace fewshot
