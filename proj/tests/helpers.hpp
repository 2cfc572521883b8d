#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "fewshot/core/rng.hpp"
#include "fewshot/core/tensor.hpp"

namespace testutil {

inline fewshot::Tensor random_tensor(std::vector<int> shape, fewshot::Rng& rng, double lo = -1.0,
                                     double hi = 1.0) {
  fewshot::Tensor t(std::move(shape));
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = rng.uniform(lo, hi);
  return t;
}

inline std::filesystem::path make_temp_dir(const std::string& tag) {
  static std::uint64_t counter = 0;
  const auto dir = std::filesystem::temp_directory_path() /
                   ("fsi2i-test-" + tag + "-" + std::to_string(::getpid()) + "-" +
                    std::to_string(counter++));
  std::filesystem::create_directories(dir);
  return dir;
}

/// Central finite difference of `loss` with respect to the value at `slot`.
inline double fd_derivative(const std::function<double()>& loss, double* slot,
                            double eps = 1e-5) {
  const double saved = *slot;
  *slot = saved + eps;
  const double up = loss();
  *slot = saved - eps;
  const double down = loss();
  *slot = saved;
  return (up - down) / (2.0 * eps);
}

/// Relative error with a small-denominator guard; negligible gradients on
/// both sides compare equal.
inline double grad_error(double analytic, double numeric) {
  const double denom = std::max(std::abs(analytic), std::abs(numeric));
  if (denom < 1e-8) return 0.0;
  return std::abs(analytic - numeric) / std::max(denom, 1e-4);
}

}  // namespace testutil
