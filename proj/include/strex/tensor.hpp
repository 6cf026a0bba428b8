#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "strex/common.hpp"

namespace strex {

// Dense row-major tensor of doubles. Rank 0 (scalar), 1 (vector) and
// 2 (matrix) are the only shapes the model graph needs.
struct Tensor {
  std::vector<std::size_t> shape;
  std::vector<double> data;

  Tensor() = default;
  Tensor(std::vector<std::size_t> s, std::vector<double> d)
      : shape(std::move(s)), data(std::move(d)) {
    if (data.size() != element_count(shape))
      throw data_error("tensor data length does not match shape");
  }

  static std::size_t element_count(const std::vector<std::size_t>& s) {
    std::size_t n = 1;
    for (std::size_t d : s) n *= d;
    return n;
  }

  static Tensor zeros(std::vector<std::size_t> s) {
    std::size_t n = element_count(s);
    return Tensor(std::move(s), std::vector<double>(n, 0.0));
  }
  static Tensor scalar(double v) { return Tensor({}, {v}); }
  static Tensor vector(std::vector<double> v) {
    std::size_t n = v.size();
    return Tensor({n}, std::move(v));
  }

  std::size_t size() const { return data.size(); }
  std::size_t rank() const { return shape.size(); }
  std::size_t rows() const { return shape.empty() ? 1 : shape[0]; }
  std::size_t cols() const { return shape.size() < 2 ? 1 : shape[1]; }

  double& operator[](std::size_t i) { return data[i]; }
  double operator[](std::size_t i) const { return data[i]; }
  double& at(std::size_t r, std::size_t c) { return data[r * cols() + c]; }
  double at(std::size_t r, std::size_t c) const { return data[r * cols() + c]; }

  bool same_shape(const Tensor& o) const { return shape == o.shape; }

  std::string shape_str() const {
    std::ostringstream os;
    os << "(";
    for (std::size_t i = 0; i < shape.size(); ++i)
      os << (i ? "," : "") << shape[i];
    os << ")";
    return os.str();
  }
};

// Numerically stabilized softmax (max subtraction). Output entries are
// positive and sum to 1 for any finite input.
inline std::vector<double> softmax(const std::vector<double>& logits) {
  if (logits.empty()) throw numeric_error("softmax of empty vector");
  double mx = *std::max_element(logits.begin(), logits.end());
  std::vector<double> out(logits.size());
  double z = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - mx);
    z += out[i];
  }
  for (double& v : out) v /= z;
  return out;
}

// Probability floor applied before taking logs so a zero probability cannot
// produce an infinite loss. Callers can detect clamping via was_clamped.
inline constexpr double kProbFloor = 1e-12;

// Cross entropy with the 1/z normalization over the class count, where z is
// the size of the distribution.
inline double cross_entropy(const std::vector<double>& probs, std::size_t gold,
                            bool* was_clamped = nullptr) {
  if (gold >= probs.size()) throw numeric_error("cross_entropy: gold class out of range");
  double p = probs[gold];
  if (p < kProbFloor) {
    p = kProbFloor;
    if (was_clamped) *was_clamped = true;
  }
  return -std::log(p) / static_cast<double>(probs.size());
}

// Inverted dropout: train mode zeroes units with probability p and scales
// survivors by 1/(1-p); eval mode is the identity.
enum class Mode { train, eval };

inline std::vector<double> dropout(const std::vector<double>& x, double p, Mode mode, Rng& rng) {
  if (!(p > 0.0 && p < 1.0)) throw numeric_error("dropout probability must be in (0,1)");
  if (mode == Mode::eval) return x;
  std::vector<double> out(x.size());
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  double keep = 1.0 - p;
  for (std::size_t i = 0; i < x.size(); ++i)
    out[i] = dist(rng) < p ? 0.0 : x[i] / keep;
  return out;
}

}  // namespace strex
