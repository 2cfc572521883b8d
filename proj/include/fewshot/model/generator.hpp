#pragma once

#include <cstdint>
#include <vector>

#include "fewshot/model/config.hpp"
#include "fewshot/model/interfaces.hpp"
#include "fewshot/nn/layers.hpp"

namespace fewshot::model {

/// Scale/shift vectors for every AdaIN layer of the decoder, stored flat in
/// the order the MLP emits them: per residual block, [scale1, shift1,
/// scale2, shift2], each of the content-code channel count.
class AdaInParams {
 public:
  AdaInParams(Tensor flat, int n_blocks, int channels);
  static AdaInParams zeros(int n_blocks, int channels);

  int n_blocks() const { return n_blocks_; }
  int channels() const { return channels_; }
  int pair_count() const { return n_blocks_ * 2; }

  /// norm is 0 or 1, the AdaIN layer within the block.
  Tensor scale(int block, int norm) const;
  Tensor shift(int block, int norm) const;

  const Tensor& flat() const { return flat_; }
  Tensor& flat() { return flat_; }

  /// Adds vectors into the flat layout; used to assemble gradients.
  void add_scale(int block, int norm, const Tensor& v);
  void add_shift(int block, int norm, const Tensor& v);

 private:
  std::size_t offset(int block, int norm, bool is_shift) const;

  Tensor flat_;
  int n_blocks_;
  int channels_;
};

/// Residual block whose two normalization layers take externally supplied
/// AdaIN scale/shift vectors.
class AdaInResBlock {
 public:
  AdaInResBlock(const std::string& name, int channels, Rng& rng);

  Tensor forward(const Tensor& x, const Tensor& scale1, const Tensor& shift1, const Tensor& scale2,
                 const Tensor& shift2, nn::Tape* tape) const;
  Tensor backward(const Tensor& grad_out, nn::Tape& tape, Tensor& dscale1, Tensor& dshift1,
                  Tensor& dscale2, Tensor& dshift2);
  void collect_params(std::vector<nn::Param*>& out);

 private:
  nn::Conv2d conv1_;
  nn::Conv2d conv2_;
  nn::ReLU relu_;
};

/// Few-shot translation generator: a content encoder producing a spatial
/// code, an averaging style encoder producing one vector per style set, an
/// MLP regressing AdaIN parameters from that vector, and an upsampling
/// decoder applying them.
class Generator : public Translator {
 public:
  Generator(const GeneratorConfig& config, std::uint64_t seed);

  const GeneratorConfig& config() const { return config_; }

  Tensor encode_content(const Tensor& x, nn::Tape* tape = nullptr) const;
  Tensor encode_style_one(const Tensor& y, nn::Tape* tape = nullptr) const;

  /// Mean of the per-image style codes. The reduction is order-independent
  /// (per-coordinate sorted summation), so permutations of `styles` give
  /// bit-identical codes.
  Tensor encode_style(const std::vector<Tensor>& styles) const;

  /// The order-independent mean used by encode_style, applied to
  /// already-encoded codes.
  static Tensor average_style_codes(const std::vector<Tensor>& codes);

  AdaInParams compute_adain_params(const Tensor& style_code, nn::Tape* tape = nullptr) const;
  Tensor decode(const Tensor& content_code, const AdaInParams& params,
                nn::Tape* tape = nullptr) const;
  Tensor translate(const Tensor& x, const std::vector<Tensor>& styles) const override;

  struct DecodeGrads {
    Tensor dcontent;
    Tensor dadain_flat;
  };
  DecodeGrads decode_backward(const Tensor& grad_image, nn::Tape& tape);
  /// Returns the style-code gradient.
  Tensor adain_params_backward(const Tensor& dadain_flat, nn::Tape& tape);
  Tensor content_backward(const Tensor& dcontent, nn::Tape& tape);
  Tensor style_one_backward(const Tensor& dstyle, nn::Tape& tape);

  std::vector<nn::Param*> params();

 private:
  GeneratorConfig config_;
  nn::Sequential content_;
  nn::Sequential style_;
  nn::Sequential mlp_;
  std::vector<AdaInResBlock> dec_blocks_;
  nn::Sequential dec_up_;
};

}  // namespace fewshot::model
