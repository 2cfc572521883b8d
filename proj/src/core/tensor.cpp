#include "fewshot/core/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace fewshot {

namespace {

std::size_t checked_total(const std::vector<int>& shape) {
  std::size_t total = 1;
  for (int d : shape) {
    if (d <= 0) throw std::invalid_argument("tensor dimensions must be positive");
    total *= static_cast<std::size_t>(d);
  }
  return total;
}

}  // namespace

Tensor::Tensor(std::vector<int> shape) : shape_(std::move(shape)) {
  data_.assign(checked_total(shape_), 0.0);
}

Tensor::Tensor(std::initializer_list<int> shape) : Tensor(std::vector<int>(shape)) {}

Tensor Tensor::of(std::vector<int> shape, std::vector<double> values) {
  if (checked_total(shape) != values.size()) {
    throw std::invalid_argument("tensor data size does not match shape");
  }
  Tensor t;
  t.shape_ = std::move(shape);
  t.data_ = std::move(values);
  return t;
}

Tensor Tensor::zeros_like(const Tensor& other) { return Tensor(other.shape_); }

int Tensor::dim(int i) const {
  if (i < 0 || i >= ndim()) throw std::invalid_argument("tensor dim index out of range");
  return shape_[i];
}

std::string Tensor::shape_string() const {
  std::string s = "(";
  for (std::size_t i = 0; i < shape_.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(shape_[i]);
  }
  return s + ")";
}

void Tensor::fill(double value) { std::fill(data_.begin(), data_.end(), value); }

bool Tensor::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

Tensor& Tensor::operator+=(const Tensor& other) {
  if (!same_shape(other)) {
    throw std::invalid_argument("tensor shape mismatch: " + shape_string() + " vs " +
                                other.shape_string());
  }
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

Tensor& Tensor::operator-=(const Tensor& other) {
  if (!same_shape(other)) {
    throw std::invalid_argument("tensor shape mismatch: " + shape_string() + " vs " +
                                other.shape_string());
  }
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
  return *this;
}

Tensor& Tensor::operator*=(double s) {
  for (double& v : data_) v *= s;
  return *this;
}

double max_abs_diff(const Tensor& a, const Tensor& b) {
  if (!a.same_shape(b)) {
    throw std::invalid_argument("tensor shape mismatch: " + a.shape_string() + " vs " +
                                b.shape_string());
  }
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace fewshot
