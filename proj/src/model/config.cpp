#include "fewshot/model/config.hpp"

#include <stdexcept>

#include "fewshot/core/errors.hpp"

namespace fewshot::model {

namespace {

int kv_int(const std::map<std::string, std::string>& kv, const std::string& key) {
  const auto it = kv.find(key);
  if (it == kv.end()) throw InputError("missing config key: " + key);
  try {
    return std::stoi(it->second);
  } catch (const std::exception&) {
    throw InputError("config key " + key + " is not an integer: " + it->second);
  }
}

}  // namespace

void GeneratorConfig::validate() const {
  if (image_size < 1 || input_channels < 1 || base_channels < 1 || n_downsample < 1 ||
      n_content_res_blocks < 1 || style_dim < 1 || n_adain_res_blocks < 1 || n_mlp_layers < 1) {
    throw InputError("generator config: all counts must be >= 1");
  }
  if (image_size % (1 << n_downsample) != 0) {
    throw InputError("generator config: image_size must be divisible by 2^n_downsample");
  }
}

std::map<std::string, std::string> GeneratorConfig::to_kv(const std::string& prefix) const {
  return {
      {prefix + "image_size", std::to_string(image_size)},
      {prefix + "input_channels", std::to_string(input_channels)},
      {prefix + "base_channels", std::to_string(base_channels)},
      {prefix + "n_downsample", std::to_string(n_downsample)},
      {prefix + "n_content_res_blocks", std::to_string(n_content_res_blocks)},
      {prefix + "style_dim", std::to_string(style_dim)},
      {prefix + "n_adain_res_blocks", std::to_string(n_adain_res_blocks)},
      {prefix + "n_mlp_layers", std::to_string(n_mlp_layers)},
  };
}

GeneratorConfig GeneratorConfig::from_kv(const std::map<std::string, std::string>& kv,
                                         const std::string& prefix) {
  GeneratorConfig c;
  c.image_size = kv_int(kv, prefix + "image_size");
  c.input_channels = kv_int(kv, prefix + "input_channels");
  c.base_channels = kv_int(kv, prefix + "base_channels");
  c.n_downsample = kv_int(kv, prefix + "n_downsample");
  c.n_content_res_blocks = kv_int(kv, prefix + "n_content_res_blocks");
  c.style_dim = kv_int(kv, prefix + "style_dim");
  c.n_adain_res_blocks = kv_int(kv, prefix + "n_adain_res_blocks");
  c.n_mlp_layers = kv_int(kv, prefix + "n_mlp_layers");
  c.validate();
  return c;
}

void DiscriminatorConfig::validate() const {
  if (n_classes < 2) throw InputError("discriminator config: n_classes must be >= 2");
  if (base_channels < 1 || n_layers < 1) {
    throw InputError("discriminator config: base_channels and n_layers must be >= 1");
  }
}

std::map<std::string, std::string> DiscriminatorConfig::to_kv(const std::string& prefix) const {
  return {
      {prefix + "n_classes", std::to_string(n_classes)},
      {prefix + "base_channels", std::to_string(base_channels)},
      {prefix + "n_layers", std::to_string(n_layers)},
  };
}

DiscriminatorConfig DiscriminatorConfig::from_kv(const std::map<std::string, std::string>& kv,
                                                 const std::string& prefix) {
  DiscriminatorConfig c;
  c.n_classes = kv_int(kv, prefix + "n_classes");
  c.base_channels = kv_int(kv, prefix + "base_channels");
  c.n_layers = kv_int(kv, prefix + "n_layers");
  c.validate();
  return c;
}

}  // namespace fewshot::model
