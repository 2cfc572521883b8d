#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace fewshot {

/// Dense row-major tensor of doubles. Rank is small in practice: 1-D vectors
/// (style codes, logits), 3-D feature maps (channels, height, width) and 4-D
/// convolution weights. All shape violations throw std::invalid_argument.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(std::vector<int> shape);
  Tensor(std::initializer_list<int> shape);
  static Tensor of(std::vector<int> shape, std::vector<double> values);
  static Tensor zeros_like(const Tensor& other);

  int ndim() const { return static_cast<int>(shape_.size()); }
  int dim(int i) const;
  const std::vector<int>& shape() const { return shape_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  // (channel, row, col) access for rank-3 tensors.
  double& at(int c, int h, int w) {
    return data_[(static_cast<std::size_t>(c) * shape_[1] + h) * shape_[2] + w];
  }
  double at(int c, int h, int w) const {
    return data_[(static_cast<std::size_t>(c) * shape_[1] + h) * shape_[2] + w];
  }

  bool same_shape(const Tensor& other) const { return shape_ == other.shape_; }
  std::string shape_string() const;

  void fill(double value);
  void zero() { fill(0.0); }
  bool all_finite() const;

  Tensor& operator+=(const Tensor& other);
  Tensor& operator-=(const Tensor& other);
  Tensor& operator*=(double s);

  friend bool operator==(const Tensor& a, const Tensor& b) {
    return a.shape_ == b.shape_ && a.data_ == b.data_;
  }

 private:
  std::vector<int> shape_;
  std::vector<double> data_;
};

/// Largest absolute elementwise difference; shapes must match.
double max_abs_diff(const Tensor& a, const Tensor& b);

}  // namespace fewshot
