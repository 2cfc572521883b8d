#include "fewshot/nn/layers.hpp"

#include <Eigen/Core>

#include <cmath>
#include <stdexcept>

namespace fewshot::nn {

namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MatMap = Eigen::Map<RowMat>;
using ConstMatMap = Eigen::Map<const RowMat>;
using VecMap = Eigen::Map<Eigen::VectorXd>;
using ConstVecMap = Eigen::Map<const Eigen::VectorXd>;

void require_chw(const Tensor& x, const char* who) {
  if (x.ndim() != 3) throw std::invalid_argument(std::string(who) + ": expected a (C,H,W) tensor");
}

Tensor gaussian_tensor(std::vector<int> shape, double stddev, Rng& rng) {
  Tensor t(std::move(shape));
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = stddev * rng.gaussian();
  return t;
}

// Unrolls conv patches into a (in_c*k*k, out_h*out_w) matrix, zero padding
// outside the image.
void im2col(const Tensor& x, int kernel, int stride, int padding, int out_h, int out_w,
            Tensor& cols) {
  const int in_c = x.dim(0), in_h = x.dim(1), in_w = x.dim(2);
  const int patch = out_h * out_w;
  double* col = cols.data();
  for (int c = 0; c < in_c; ++c) {
    for (int ky = 0; ky < kernel; ++ky) {
      for (int kx = 0; kx < kernel; ++kx) {
        double* row = col + (static_cast<std::size_t>(c) * kernel * kernel + ky * kernel + kx) * patch;
        for (int oy = 0; oy < out_h; ++oy) {
          const int sy = oy * stride - padding + ky;
          for (int ox = 0; ox < out_w; ++ox) {
            const int sx = ox * stride - padding + kx;
            row[oy * out_w + ox] =
                (sy >= 0 && sy < in_h && sx >= 0 && sx < in_w) ? x.at(c, sy, sx) : 0.0;
          }
        }
      }
    }
  }
}

void col2im(const Tensor& cols, int kernel, int stride, int padding, int out_h, int out_w,
            Tensor& dx) {
  const int in_h = dx.dim(1), in_w = dx.dim(2);
  const int patch = out_h * out_w;
  const double* col = cols.data();
  for (int c = 0; c < dx.dim(0); ++c) {
    for (int ky = 0; ky < kernel; ++ky) {
      for (int kx = 0; kx < kernel; ++kx) {
        const double* row =
            col + (static_cast<std::size_t>(c) * kernel * kernel + ky * kernel + kx) * patch;
        for (int oy = 0; oy < out_h; ++oy) {
          const int sy = oy * stride - padding + ky;
          if (sy < 0 || sy >= in_h) continue;
          for (int ox = 0; ox < out_w; ++ox) {
            const int sx = ox * stride - padding + kx;
            if (sx < 0 || sx >= in_w) continue;
            dx.at(c, sy, sx) += row[oy * out_w + ox];
          }
        }
      }
    }
  }
}

}  // namespace

Conv2d::Conv2d(std::string name, int in_channels, int out_channels, int kernel, int stride,
               int padding, Rng& rng)
    : in_channels_(in_channels),
      out_channels_(out_channels),
      kernel_(kernel),
      stride_(stride),
      padding_(padding),
      weight_(name + ".weight",
              gaussian_tensor({out_channels, in_channels * kernel * kernel},
                              std::sqrt(2.0 / (in_channels * kernel * kernel)), rng)),
      bias_(name + ".bias", Tensor({out_channels})) {}

Tensor Conv2d::forward(const Tensor& x, Tape* tape) const {
  require_chw(x, "Conv2d");
  if (x.dim(0) != in_channels_) {
    throw std::invalid_argument("Conv2d: expected " + std::to_string(in_channels_) +
                                " input channels, got " + std::to_string(x.dim(0)));
  }
  const int in_h = x.dim(1), in_w = x.dim(2);
  const int out_h = (in_h + 2 * padding_ - kernel_) / stride_ + 1;
  const int out_w = (in_w + 2 * padding_ - kernel_) / stride_ + 1;
  if (out_h <= 0 || out_w <= 0) throw std::invalid_argument("Conv2d: input too small for kernel");

  const int ick2 = in_channels_ * kernel_ * kernel_;
  const int patch = out_h * out_w;
  Tensor cols({ick2, patch});
  im2col(x, kernel_, stride_, padding_, out_h, out_w, cols);

  Tensor y({out_channels_, out_h, out_w});
  MatMap(y.data(), out_channels_, patch).noalias() =
      ConstMatMap(weight_.value.data(), out_channels_, ick2) * ConstMatMap(cols.data(), ick2, patch);
  for (int o = 0; o < out_channels_; ++o) {
    double* ch = y.data() + static_cast<std::size_t>(o) * patch;
    const double b = bias_.value[o];
    for (int p = 0; p < patch; ++p) ch[p] += b;
  }

  if (tape) {
    tape->push(Tensor::of({2}, {static_cast<double>(in_h), static_cast<double>(in_w)}));
    tape->push(std::move(cols));
  }
  return y;
}

Tensor Conv2d::backward(const Tensor& grad_out, Tape& tape) {
  const Tensor cols = tape.pop();
  const Tensor in_shape = tape.pop();
  const int in_h = static_cast<int>(in_shape[0]);
  const int in_w = static_cast<int>(in_shape[1]);
  const int out_h = grad_out.dim(1), out_w = grad_out.dim(2);
  const int patch = out_h * out_w;
  const int ick2 = in_channels_ * kernel_ * kernel_;

  ConstMatMap dy(grad_out.data(), out_channels_, patch);
  MatMap(weight_.grad.data(), out_channels_, ick2).noalias() +=
      dy * ConstMatMap(cols.data(), ick2, patch).transpose();
  for (int o = 0; o < out_channels_; ++o) bias_.grad[o] += dy.row(o).sum();

  Tensor dcols({ick2, patch});
  MatMap(dcols.data(), ick2, patch).noalias() =
      ConstMatMap(weight_.value.data(), out_channels_, ick2).transpose() * dy;

  Tensor dx({in_channels_, in_h, in_w});
  col2im(dcols, kernel_, stride_, padding_, out_h, out_w, dx);
  return dx;
}

void Conv2d::collect_params(std::vector<Param*>& out) {
  out.push_back(&weight_);
  out.push_back(&bias_);
}

Tensor InstanceNorm::forward(const Tensor& x, Tape* tape) const {
  require_chw(x, "InstanceNorm");
  const int channels = x.dim(0);
  const int hw = x.dim(1) * x.dim(2);
  Tensor xhat = Tensor::zeros_like(x);
  Tensor inv_std({channels});
  for (int c = 0; c < channels; ++c) {
    const double* src = x.data() + static_cast<std::size_t>(c) * hw;
    double mean = 0.0;
    for (int i = 0; i < hw; ++i) mean += src[i];
    mean /= hw;
    double var = 0.0;
    for (int i = 0; i < hw; ++i) var += (src[i] - mean) * (src[i] - mean);
    var /= hw;
    const double inv = 1.0 / std::sqrt(var + eps_);
    inv_std[c] = inv;
    double* dst = xhat.data() + static_cast<std::size_t>(c) * hw;
    for (int i = 0; i < hw; ++i) dst[i] = (src[i] - mean) * inv;
  }
  if (tape) {
    tape->push(xhat);
    tape->push(inv_std);
  }
  return xhat;
}

Tensor InstanceNorm::backward(const Tensor& grad_out, Tape& tape) {
  const Tensor inv_std = tape.pop();
  const Tensor xhat = tape.pop();
  const int channels = grad_out.dim(0);
  const int hw = grad_out.dim(1) * grad_out.dim(2);
  Tensor dx = Tensor::zeros_like(grad_out);
  for (int c = 0; c < channels; ++c) {
    const double* dy = grad_out.data() + static_cast<std::size_t>(c) * hw;
    const double* xh = xhat.data() + static_cast<std::size_t>(c) * hw;
    double mean_dy = 0.0, mean_dyxh = 0.0;
    for (int i = 0; i < hw; ++i) {
      mean_dy += dy[i];
      mean_dyxh += dy[i] * xh[i];
    }
    mean_dy /= hw;
    mean_dyxh /= hw;
    double* out = dx.data() + static_cast<std::size_t>(c) * hw;
    const double inv = inv_std[c];
    for (int i = 0; i < hw; ++i) out[i] = inv * (dy[i] - mean_dy - xh[i] * mean_dyxh);
  }
  return dx;
}

Tensor ReLU::forward(const Tensor& x, Tape* tape) const {
  Tensor y = Tensor::zeros_like(x);
  Tensor mask = Tensor::zeros_like(x);
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] > 0.0) {
      y[i] = x[i];
      mask[i] = 1.0;
    }
  }
  if (tape) tape->push(std::move(mask));
  return y;
}

Tensor ReLU::backward(const Tensor& grad_out, Tape& tape) {
  const Tensor mask = tape.pop();
  Tensor dx = Tensor::zeros_like(grad_out);
  for (std::size_t i = 0; i < dx.size(); ++i) dx[i] = grad_out[i] * mask[i];
  return dx;
}

Tensor LeakyReLU::forward(const Tensor& x, Tape* tape) const {
  Tensor y = Tensor::zeros_like(x);
  Tensor mask = Tensor::zeros_like(x);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double m = x[i] > 0.0 ? 1.0 : slope_;
    y[i] = m * x[i];
    mask[i] = m;
  }
  if (tape) tape->push(std::move(mask));
  return y;
}

Tensor LeakyReLU::backward(const Tensor& grad_out, Tape& tape) {
  const Tensor mask = tape.pop();
  Tensor dx = Tensor::zeros_like(grad_out);
  for (std::size_t i = 0; i < dx.size(); ++i) dx[i] = grad_out[i] * mask[i];
  return dx;
}

Tensor Tanh::forward(const Tensor& x, Tape* tape) const {
  Tensor y = Tensor::zeros_like(x);
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = std::tanh(x[i]);
  if (tape) tape->push(y);
  return y;
}

Tensor Tanh::backward(const Tensor& grad_out, Tape& tape) {
  const Tensor y = tape.pop();
  Tensor dx = Tensor::zeros_like(grad_out);
  for (std::size_t i = 0; i < dx.size(); ++i) dx[i] = grad_out[i] * (1.0 - y[i] * y[i]);
  return dx;
}

Tensor Upsample2x::forward(const Tensor& x, Tape* tape) const {
  require_chw(x, "Upsample2x");
  (void)tape;
  const int c = x.dim(0), h = x.dim(1), w = x.dim(2);
  Tensor y({c, 2 * h, 2 * w});
  for (int ci = 0; ci < c; ++ci) {
    for (int yi = 0; yi < h; ++yi) {
      for (int xi = 0; xi < w; ++xi) {
        const double v = x.at(ci, yi, xi);
        y.at(ci, 2 * yi, 2 * xi) = v;
        y.at(ci, 2 * yi, 2 * xi + 1) = v;
        y.at(ci, 2 * yi + 1, 2 * xi) = v;
        y.at(ci, 2 * yi + 1, 2 * xi + 1) = v;
      }
    }
  }
  return y;
}

Tensor Upsample2x::backward(const Tensor& grad_out, Tape& tape) {
  (void)tape;
  const int c = grad_out.dim(0), h = grad_out.dim(1) / 2, w = grad_out.dim(2) / 2;
  Tensor dx({c, h, w});
  for (int ci = 0; ci < c; ++ci) {
    for (int yi = 0; yi < h; ++yi) {
      for (int xi = 0; xi < w; ++xi) {
        dx.at(ci, yi, xi) = grad_out.at(ci, 2 * yi, 2 * xi) + grad_out.at(ci, 2 * yi, 2 * xi + 1) +
                            grad_out.at(ci, 2 * yi + 1, 2 * xi) +
                            grad_out.at(ci, 2 * yi + 1, 2 * xi + 1);
      }
    }
  }
  return dx;
}

Linear::Linear(std::string name, int in_features, int out_features, Rng& rng)
    : in_features_(in_features),
      out_features_(out_features),
      weight_(name + ".weight",
              gaussian_tensor({out_features, in_features}, std::sqrt(2.0 / in_features), rng)),
      bias_(name + ".bias", Tensor({out_features})) {}

Tensor Linear::forward(const Tensor& x, Tape* tape) const {
  if (x.ndim() != 1 || x.dim(0) != in_features_) {
    throw std::invalid_argument("Linear: expected a (" + std::to_string(in_features_) + ") vector");
  }
  Tensor y({out_features_});
  VecMap(y.data(), out_features_).noalias() =
      ConstMatMap(weight_.value.data(), out_features_, in_features_) *
      ConstVecMap(x.data(), in_features_);
  for (int o = 0; o < out_features_; ++o) y[o] += bias_.value[o];
  if (tape) tape->push(x);
  return y;
}

Tensor Linear::backward(const Tensor& grad_out, Tape& tape) {
  const Tensor x = tape.pop();
  MatMap(weight_.grad.data(), out_features_, in_features_).noalias() +=
      ConstVecMap(grad_out.data(), out_features_) * ConstVecMap(x.data(), in_features_).transpose();
  for (int o = 0; o < out_features_; ++o) bias_.grad[o] += grad_out[o];
  Tensor dx({in_features_});
  VecMap(dx.data(), in_features_).noalias() =
      ConstMatMap(weight_.value.data(), out_features_, in_features_).transpose() *
      ConstVecMap(grad_out.data(), out_features_);
  return dx;
}

void Linear::collect_params(std::vector<Param*>& out) {
  out.push_back(&weight_);
  out.push_back(&bias_);
}

Tensor GlobalAvgPool::forward(const Tensor& x, Tape* tape) const {
  require_chw(x, "GlobalAvgPool");
  const int c = x.dim(0);
  const int hw = x.dim(1) * x.dim(2);
  Tensor y({c});
  for (int ci = 0; ci < c; ++ci) {
    const double* src = x.data() + static_cast<std::size_t>(ci) * hw;
    double sum = 0.0;
    for (int i = 0; i < hw; ++i) sum += src[i];
    y[ci] = sum / hw;
  }
  if (tape) {
    tape->push(Tensor::of({3}, {static_cast<double>(c), static_cast<double>(x.dim(1)),
                                static_cast<double>(x.dim(2))}));
  }
  return y;
}

Tensor GlobalAvgPool::backward(const Tensor& grad_out, Tape& tape) {
  const Tensor shape = tape.pop();
  const int c = static_cast<int>(shape[0]);
  const int h = static_cast<int>(shape[1]);
  const int w = static_cast<int>(shape[2]);
  Tensor dx({c, h, w});
  for (int ci = 0; ci < c; ++ci) {
    const double g = grad_out[ci] / (h * w);
    double* dst = dx.data() + static_cast<std::size_t>(ci) * h * w;
    for (int i = 0; i < h * w; ++i) dst[i] = g;
  }
  return dx;
}

Tensor Sequential::forward(const Tensor& x, Tape* tape) const {
  Tensor y = x;
  for (const auto& layer : layers_) y = layer->forward(y, tape);
  return y;
}

Tensor Sequential::backward(const Tensor& grad_out, Tape& tape) {
  Tensor g = grad_out;
  for (auto it = layers_.rbegin(); it != layers_.rend(); ++it) g = (*it)->backward(g, tape);
  return g;
}

void Sequential::collect_params(std::vector<Param*>& out) {
  for (auto& layer : layers_) layer->collect_params(out);
}

ResBlock::ResBlock(const std::string& name, int channels, Rng& rng) {
  body_.add(std::make_unique<Conv2d>(name + ".conv1", channels, channels, 3, 1, 1, rng));
  body_.add(std::make_unique<InstanceNorm>());
  body_.add(std::make_unique<ReLU>());
  body_.add(std::make_unique<Conv2d>(name + ".conv2", channels, channels, 3, 1, 1, rng));
  body_.add(std::make_unique<InstanceNorm>());
}

Tensor ResBlock::forward(const Tensor& x, Tape* tape) const {
  Tensor y = body_.forward(x, tape);
  y += x;
  return y;
}

Tensor ResBlock::backward(const Tensor& grad_out, Tape& tape) {
  Tensor dx = body_.backward(grad_out, tape);
  dx += grad_out;
  return dx;
}

void ResBlock::collect_params(std::vector<Param*>& out) { body_.collect_params(out); }

Tensor adain(const Tensor& features, const Tensor& scale, const Tensor& shift, double eps) {
  return adain_forward(features, scale, shift, nullptr, eps);
}

Tensor adain_forward(const Tensor& features, const Tensor& scale, const Tensor& shift, Tape* tape,
                     double eps) {
  require_chw(features, "adain");
  const int channels = features.dim(0);
  if (scale.ndim() != 1 || scale.dim(0) != channels || shift.ndim() != 1 ||
      shift.dim(0) != channels) {
    throw std::invalid_argument("adain: scale/shift length must equal the channel count");
  }
  const int hw = features.dim(1) * features.dim(2);
  Tensor y = Tensor::zeros_like(features);
  Tensor xhat = Tensor::zeros_like(features);
  Tensor inv_std({channels});
  for (int c = 0; c < channels; ++c) {
    const double* src = features.data() + static_cast<std::size_t>(c) * hw;
    double mean = 0.0;
    for (int i = 0; i < hw; ++i) mean += src[i];
    mean /= hw;
    double var = 0.0;
    for (int i = 0; i < hw; ++i) var += (src[i] - mean) * (src[i] - mean);
    var /= hw;
    const double inv = 1.0 / std::sqrt(var + eps);
    inv_std[c] = inv;
    double* xh = xhat.data() + static_cast<std::size_t>(c) * hw;
    double* dst = y.data() + static_cast<std::size_t>(c) * hw;
    for (int i = 0; i < hw; ++i) {
      xh[i] = (src[i] - mean) * inv;
      dst[i] = scale[c] * xh[i] + shift[c];
    }
  }
  if (tape) {
    tape->push(std::move(xhat));
    tape->push(std::move(inv_std));
    tape->push(scale);
  }
  return y;
}

Tensor adain_backward(const Tensor& grad_out, Tape& tape, Tensor& dscale, Tensor& dshift) {
  const Tensor scale = tape.pop();
  const Tensor inv_std = tape.pop();
  const Tensor xhat = tape.pop();
  const int channels = grad_out.dim(0);
  const int hw = grad_out.dim(1) * grad_out.dim(2);
  Tensor dx = Tensor::zeros_like(grad_out);
  for (int c = 0; c < channels; ++c) {
    const double* dy = grad_out.data() + static_cast<std::size_t>(c) * hw;
    const double* xh = xhat.data() + static_cast<std::size_t>(c) * hw;
    double sum_dy = 0.0, sum_dyxh = 0.0;
    for (int i = 0; i < hw; ++i) {
      sum_dy += dy[i];
      sum_dyxh += dy[i] * xh[i];
    }
    dshift[c] += sum_dy;
    dscale[c] += sum_dyxh;
    // Gradient through the normalization of xhat, with dL/dxhat = scale * dy.
    const double mean_g = scale[c] * sum_dy / hw;
    const double mean_gxh = scale[c] * sum_dyxh / hw;
    double* out = dx.data() + static_cast<std::size_t>(c) * hw;
    for (int i = 0; i < hw; ++i) {
      out[i] = inv_std[c] * (scale[c] * dy[i] - mean_g - xh[i] * mean_gxh);
    }
  }
  return dx;
}

}  // namespace fewshot::nn
