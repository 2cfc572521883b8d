#include "fewshot/model/generator.hpp"

#include <algorithm>
#include <stdexcept>

#include "fewshot/core/image_ops.hpp"
#include "fewshot/core/rng.hpp"

namespace fewshot::model {

using nn::Tape;

AdaInParams::AdaInParams(Tensor flat, int n_blocks, int channels)
    : flat_(std::move(flat)), n_blocks_(n_blocks), channels_(channels) {
  if (flat_.ndim() != 1 ||
      flat_.dim(0) != n_blocks * 2 * 2 * channels) {
    throw std::invalid_argument("AdaInParams: flat vector has wrong length");
  }
}

AdaInParams AdaInParams::zeros(int n_blocks, int channels) {
  return AdaInParams(Tensor({n_blocks * 2 * 2 * channels}), n_blocks, channels);
}

std::size_t AdaInParams::offset(int block, int norm, bool is_shift) const {
  if (block < 0 || block >= n_blocks_ || norm < 0 || norm > 1) {
    throw std::invalid_argument("AdaInParams: block/norm index out of range");
  }
  return (static_cast<std::size_t>(block) * 4 + norm * 2 + (is_shift ? 1 : 0)) * channels_;
}

Tensor AdaInParams::scale(int block, int norm) const {
  Tensor v({channels_});
  const std::size_t o = offset(block, norm, false);
  for (int c = 0; c < channels_; ++c) v[c] = flat_[o + c];
  return v;
}

Tensor AdaInParams::shift(int block, int norm) const {
  Tensor v({channels_});
  const std::size_t o = offset(block, norm, true);
  for (int c = 0; c < channels_; ++c) v[c] = flat_[o + c];
  return v;
}

void AdaInParams::add_scale(int block, int norm, const Tensor& v) {
  const std::size_t o = offset(block, norm, false);
  for (int c = 0; c < channels_; ++c) flat_[o + c] += v[c];
}

void AdaInParams::add_shift(int block, int norm, const Tensor& v) {
  const std::size_t o = offset(block, norm, true);
  for (int c = 0; c < channels_; ++c) flat_[o + c] += v[c];
}

AdaInResBlock::AdaInResBlock(const std::string& name, int channels, Rng& rng)
    : conv1_(name + ".conv1", channels, channels, 3, 1, 1, rng),
      conv2_(name + ".conv2", channels, channels, 3, 1, 1, rng) {}

Tensor AdaInResBlock::forward(const Tensor& x, const Tensor& scale1, const Tensor& shift1,
                              const Tensor& scale2, const Tensor& shift2, Tape* tape) const {
  Tensor h = conv1_.forward(x, tape);
  h = nn::adain_forward(h, scale1, shift1, tape);
  h = relu_.forward(h, tape);
  h = conv2_.forward(h, tape);
  h = nn::adain_forward(h, scale2, shift2, tape);
  h += x;
  return h;
}

Tensor AdaInResBlock::backward(const Tensor& grad_out, Tape& tape, Tensor& dscale1,
                               Tensor& dshift1, Tensor& dscale2, Tensor& dshift2) {
  Tensor g = nn::adain_backward(grad_out, tape, dscale2, dshift2);
  g = conv2_.backward(g, tape);
  g = relu_.backward(g, tape);
  g = nn::adain_backward(g, tape, dscale1, dshift1);
  g = conv1_.backward(g, tape);
  g += grad_out;
  return g;
}

void AdaInResBlock::collect_params(std::vector<nn::Param*>& out) {
  conv1_.collect_params(out);
  conv2_.collect_params(out);
}

namespace {

void require_image(const Tensor& x, const GeneratorConfig& cfg, const char* who) {
  if (x.ndim() != 3 || x.dim(0) != cfg.input_channels || x.dim(1) != cfg.image_size ||
      x.dim(2) != cfg.image_size) {
    throw std::invalid_argument(std::string(who) + ": expected a (" +
                                std::to_string(cfg.input_channels) + "," +
                                std::to_string(cfg.image_size) + "," +
                                std::to_string(cfg.image_size) + ") image, got " +
                                x.shape_string());
  }
  require_unit_range(x, who);
}

}  // namespace

Generator::Generator(const GeneratorConfig& config, std::uint64_t seed) : config_(config) {
  config_.validate();
  Rng rng(mix_seed(seed, fnv1a("generator")));

  // Content encoder: stem, strided downsampling with instance norm, then
  // residual blocks at the code resolution.
  int ch = config_.base_channels;
  content_.add(std::make_unique<nn::Conv2d>("gen.content.stem", config_.input_channels, ch, 7, 1, 3, rng));
  content_.add(std::make_unique<nn::InstanceNorm>());
  content_.add(std::make_unique<nn::ReLU>());
  for (int i = 0; i < config_.n_downsample; ++i) {
    content_.add(std::make_unique<nn::Conv2d>("gen.content.down" + std::to_string(i), ch, ch * 2, 4,
                                              2, 1, rng));
    content_.add(std::make_unique<nn::InstanceNorm>());
    content_.add(std::make_unique<nn::ReLU>());
    ch *= 2;
  }
  for (int i = 0; i < config_.n_content_res_blocks; ++i) {
    content_.add(std::make_unique<nn::ResBlock>("gen.content.res" + std::to_string(i), ch, rng));
  }

  // Style encoder: no normalization layers, so image statistics survive to
  // the code.
  int sch = config_.base_channels;
  style_.add(std::make_unique<nn::Conv2d>("gen.style.stem", config_.input_channels, sch, 7, 1, 3, rng));
  style_.add(std::make_unique<nn::ReLU>());
  for (int i = 0; i < config_.n_downsample; ++i) {
    style_.add(
        std::make_unique<nn::Conv2d>("gen.style.down" + std::to_string(i), sch, sch * 2, 4, 2, 1, rng));
    style_.add(std::make_unique<nn::ReLU>());
    sch *= 2;
  }
  style_.add(std::make_unique<nn::GlobalAvgPool>());
  style_.add(std::make_unique<nn::Linear>("gen.style.fc", sch, config_.style_dim, rng));

  // MLP from style code to the flat AdaIN parameter vector.
  const int hidden = 2 * config_.style_dim;
  const int out_dim = config_.adain_param_count();
  if (config_.n_mlp_layers == 1) {
    mlp_.add(std::make_unique<nn::Linear>("gen.mlp.0", config_.style_dim, out_dim, rng));
  } else {
    mlp_.add(std::make_unique<nn::Linear>("gen.mlp.0", config_.style_dim, hidden, rng));
    mlp_.add(std::make_unique<nn::ReLU>());
    for (int i = 1; i < config_.n_mlp_layers - 1; ++i) {
      mlp_.add(std::make_unique<nn::Linear>("gen.mlp." + std::to_string(i), hidden, hidden, rng));
      mlp_.add(std::make_unique<nn::ReLU>());
    }
    mlp_.add(std::make_unique<nn::Linear>("gen.mlp." + std::to_string(config_.n_mlp_layers - 1),
                                          hidden, out_dim, rng));
  }

  // Decoder: AdaIN residual blocks at code resolution, then upsampling back
  // to image resolution with a bounded output activation.
  const int code_ch = config_.code_channels();
  for (int i = 0; i < config_.n_adain_res_blocks; ++i) {
    dec_blocks_.emplace_back("gen.dec.adain" + std::to_string(i), code_ch, rng);
  }
  int dch = code_ch;
  for (int i = 0; i < config_.n_downsample; ++i) {
    dec_up_.add(std::make_unique<nn::Upsample2x>());
    dec_up_.add(
        std::make_unique<nn::Conv2d>("gen.dec.up" + std::to_string(i), dch, dch / 2, 5, 1, 2, rng));
    dec_up_.add(std::make_unique<nn::InstanceNorm>());
    dec_up_.add(std::make_unique<nn::ReLU>());
    dch /= 2;
  }
  dec_up_.add(std::make_unique<nn::Conv2d>("gen.dec.out", dch, config_.input_channels, 7, 1, 3, rng));
  dec_up_.add(std::make_unique<nn::Tanh>());
}

Tensor Generator::encode_content(const Tensor& x, Tape* tape) const {
  require_image(x, config_, "encode_content");
  return content_.forward(x, tape);
}

Tensor Generator::encode_style_one(const Tensor& y, Tape* tape) const {
  require_image(y, config_, "encode_style_one");
  return style_.forward(y, tape);
}

Tensor Generator::encode_style(const std::vector<Tensor>& styles) const {
  if (styles.empty()) throw std::invalid_argument("encode_style: need at least one style image");
  std::vector<Tensor> codes;
  codes.reserve(styles.size());
  for (const Tensor& y : styles) codes.push_back(encode_style_one(y));
  return average_style_codes(codes);
}

Tensor Generator::average_style_codes(const std::vector<Tensor>& codes) {
  if (codes.empty()) throw std::invalid_argument("average_style_codes: empty code list");
  const int dim = codes.front().dim(0);
  Tensor mean({dim});
  std::vector<double> vals(codes.size());
  for (int j = 0; j < dim; ++j) {
    for (std::size_t k = 0; k < codes.size(); ++k) vals[k] = codes[k][j];
    // Pivot-shifted sum in sorted order: independent of the order the style
    // images arrive in, and exact when all codes coincide (the deviations
    // are identically zero).
    std::sort(vals.begin(), vals.end());
    const double pivot = vals.front();
    double sum = 0.0;
    for (double v : vals) sum += v - pivot;
    mean[j] = pivot + sum / static_cast<double>(codes.size());
  }
  return mean;
}

AdaInParams Generator::compute_adain_params(const Tensor& style_code, Tape* tape) const {
  if (style_code.ndim() != 1 || style_code.dim(0) != config_.style_dim) {
    throw std::invalid_argument("compute_adain_params: expected a style vector of length " +
                                std::to_string(config_.style_dim));
  }
  Tensor flat = mlp_.forward(style_code, tape);
  return AdaInParams(std::move(flat), config_.n_adain_res_blocks, config_.code_channels());
}

Tensor Generator::decode(const Tensor& content_code, const AdaInParams& params, Tape* tape) const {
  const int code_ch = config_.code_channels();
  const int code_sz = config_.code_size();
  if (content_code.ndim() != 3 || content_code.dim(0) != code_ch ||
      content_code.dim(1) != code_sz || content_code.dim(2) != code_sz) {
    throw std::invalid_argument("decode: content code must be (" + std::to_string(code_ch) + "," +
                                std::to_string(code_sz) + "," + std::to_string(code_sz) +
                                "), got " + content_code.shape_string());
  }
  if (params.n_blocks() != config_.n_adain_res_blocks || params.channels() != code_ch) {
    throw std::invalid_argument("decode: AdaIN parameter layout does not match the config");
  }
  Tensor h = content_code;
  for (std::size_t i = 0; i < dec_blocks_.size(); ++i) {
    const int b = static_cast<int>(i);
    h = dec_blocks_[i].forward(h, params.scale(b, 0), params.shift(b, 0), params.scale(b, 1),
                               params.shift(b, 1), tape);
  }
  return dec_up_.forward(h, tape);
}

Tensor Generator::translate(const Tensor& x, const std::vector<Tensor>& styles) const {
  const Tensor content = encode_content(x);
  const Tensor style = encode_style(styles);
  return decode(content, compute_adain_params(style));
}

Generator::DecodeGrads Generator::decode_backward(const Tensor& grad_image, Tape& tape) {
  DecodeGrads grads;
  AdaInParams dparams = AdaInParams::zeros(config_.n_adain_res_blocks, config_.code_channels());
  Tensor g = dec_up_.backward(grad_image, tape);
  for (int i = static_cast<int>(dec_blocks_.size()) - 1; i >= 0; --i) {
    Tensor ds1({config_.code_channels()}), dh1({config_.code_channels()});
    Tensor ds2({config_.code_channels()}), dh2({config_.code_channels()});
    g = dec_blocks_[i].backward(g, tape, ds1, dh1, ds2, dh2);
    dparams.add_scale(i, 0, ds1);
    dparams.add_shift(i, 0, dh1);
    dparams.add_scale(i, 1, ds2);
    dparams.add_shift(i, 1, dh2);
  }
  grads.dcontent = std::move(g);
  grads.dadain_flat = std::move(dparams.flat());
  return grads;
}

Tensor Generator::adain_params_backward(const Tensor& dadain_flat, Tape& tape) {
  return mlp_.backward(dadain_flat, tape);
}

Tensor Generator::content_backward(const Tensor& dcontent, Tape& tape) {
  return content_.backward(dcontent, tape);
}

Tensor Generator::style_one_backward(const Tensor& dstyle, Tape& tape) {
  return style_.backward(dstyle, tape);
}

std::vector<nn::Param*> Generator::params() {
  std::vector<nn::Param*> out;
  content_.collect_params(out);
  style_.collect_params(out);
  mlp_.collect_params(out);
  for (auto& block : dec_blocks_) block.collect_params(out);
  dec_up_.collect_params(out);
  return out;
}

}  // namespace fewshot::model
