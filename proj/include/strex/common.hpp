#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace strex {

// Malformed or inconsistent input data (files, records, shapes read from disk).
class data_error : public std::runtime_error {
public:
  explicit data_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Numerical failure during training or inference (NaN loss, bad graph use).
class numeric_error : public std::runtime_error {
public:
  explicit numeric_error(const std::string& msg) : std::runtime_error(msg) {}
};

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) {
  std::uniform_real_distribution<double> dist(lo, hi);
  return dist(rng);
}

}  // namespace strex
