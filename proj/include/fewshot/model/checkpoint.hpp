#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "fewshot/core/tensor.hpp"
#include "fewshot/model/config.hpp"
#include "fewshot/model/discriminator.hpp"
#include "fewshot/model/generator.hpp"

namespace fewshot::model {

/// Versioned training snapshot: both model configs, the ordered class list
/// the discriminator heads correspond to, every named parameter tensor,
/// optimizer accumulators, and the iteration counter. Binary layout is
/// little-endian with raw doubles, so save/load round-trips bit-exactly.
struct Checkpoint {
  GeneratorConfig gen_config;
  DiscriminatorConfig disc_config;
  std::vector<std::string> class_names;
  std::map<std::string, std::string> extra;  // trainer hyperparameters, run metadata
  std::uint64_t iteration = 0;
  std::map<std::string, Tensor> tensors;

  /// Writes to a temporary file and renames, so an interrupted save never
  /// leaves a truncated checkpoint behind.
  void save(const std::filesystem::path& path) const;
  static Checkpoint load(const std::filesystem::path& path);
};

/// Copies parameter tensors from a checkpoint into freshly built models.
/// Throws InputError if the checkpoint's configs do not match.
void restore_params(const Checkpoint& ckpt, Generator& gen, Discriminator& disc);

/// Collects current parameter values under their names.
void capture_params(Generator& gen, Discriminator& disc, std::map<std::string, Tensor>& out);

}  // namespace fewshot::model
