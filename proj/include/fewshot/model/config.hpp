#pragma once

#include <map>
#include <string>

namespace fewshot::model {

/// Two-encoder generator hyperparameters. The decoder mirrors the content
/// encoder, so a single downsampling count fixes both spatial ladders.
struct GeneratorConfig {
  int image_size = 64;
  int input_channels = 3;
  int base_channels = 32;
  int n_downsample = 2;
  int n_content_res_blocks = 2;
  int style_dim = 64;
  int n_adain_res_blocks = 2;
  int n_mlp_layers = 3;

  /// Channel count of the content code.
  int code_channels() const { return base_channels << n_downsample; }
  /// Spatial side of the content code.
  int code_size() const { return image_size >> n_downsample; }
  /// Two AdaIN layers per residual block, each with a scale and shift vector.
  int adain_pair_count() const { return n_adain_res_blocks * 2; }
  int adain_param_count() const { return adain_pair_count() * 2 * code_channels(); }

  void validate() const;
  std::map<std::string, std::string> to_kv(const std::string& prefix) const;
  static GeneratorConfig from_kv(const std::map<std::string, std::string>& kv,
                                 const std::string& prefix);
  bool operator==(const GeneratorConfig&) const = default;
};

/// Shared convolutional trunk with one realness output per class.
struct DiscriminatorConfig {
  int n_classes = 4;
  int base_channels = 32;
  int n_layers = 3;

  int feature_dim() const { return base_channels << n_layers; }

  void validate() const;
  std::map<std::string, std::string> to_kv(const std::string& prefix) const;
  static DiscriminatorConfig from_kv(const std::map<std::string, std::string>& kv,
                                     const std::string& prefix);
  bool operator==(const DiscriminatorConfig&) const = default;
};

}  // namespace fewshot::model
