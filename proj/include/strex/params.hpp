#pragma once

#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "strex/common.hpp"
#include "strex/tensor.hpp"

namespace strex {

// Parameter partition: shared encoder parameters vs. the per-task attention
// and output parameters.
enum class Partition { shared, head, tail, relation };

inline const char* partition_name(Partition p) {
  switch (p) {
    case Partition::shared: return "shared";
    case Partition::head: return "head";
    case Partition::tail: return "tail";
    case Partition::relation: return "relation";
  }
  return "?";
}

inline Partition partition_from_name(const std::string& s) {
  if (s == "shared") return Partition::shared;
  if (s == "head") return Partition::head;
  if (s == "tail") return Partition::tail;
  if (s == "relation") return Partition::relation;
  throw data_error("unknown partition tag '" + s + "'");
}

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// Named tensors with partition tags and per-tensor Adam moment accumulators.
class ParamStore {
public:
  struct Entry {
    Tensor value;
    Tensor m;  // first moment
    Tensor v;  // second moment
    Partition tag = Partition::shared;
  };

  void add(const std::string& name, Tensor t, Partition tag) {
    if (entries_.count(name)) throw data_error("duplicate parameter '" + name + "'");
    Entry e;
    e.m = Tensor::zeros(t.shape);
    e.v = Tensor::zeros(t.shape);
    e.value = std::move(t);
    e.tag = tag;
    order_.push_back(name);
    entries_.emplace(name, std::move(e));
  }

  bool contains(const std::string& name) const { return entries_.count(name) > 0; }

  const Tensor& value(const std::string& name) const { return entry(name).value; }
  Tensor& value(const std::string& name) { return entry(name).value; }
  Partition tag(const std::string& name) const { return entry(name).tag; }
  const Entry& entry(const std::string& name) const {
    auto it = entries_.find(name);
    if (it == entries_.end()) throw data_error("unknown parameter '" + name + "'");
    return it->second;
  }
  Entry& entry(const std::string& name) {
    auto it = entries_.find(name);
    if (it == entries_.end()) throw data_error("unknown parameter '" + name + "'");
    return it->second;
  }

  // Names in creation order; the order is part of the determinism contract.
  const std::vector<std::string>& names() const { return order_; }

  std::vector<std::string> names_in(Partition tag) const {
    std::vector<std::string> out;
    for (const auto& n : order_)
      if (entries_.at(n).tag == tag) out.push_back(n);
    return out;
  }

  std::uint64_t step() const { return step_; }
  void set_step(std::uint64_t s) { step_ = s; }

  // Sum of squared entries over the selected partitions, times beta.
  double l2_penalty(const std::set<Partition>& tags, double beta) const {
    double acc = 0.0;
    for (const auto& n : order_) {
      const Entry& e = entries_.at(n);
      if (!tags.count(e.tag)) continue;
      for (double x : e.value.data) acc += x * x;
    }
    return beta * acc;
  }

  // One Adam update with bias correction over the given gradients. Parameters
  // without a gradient entry are treated as having zero gradient, so their
  // moments decay but fresh (zero) moments leave them untouched.
  void adam_step(const std::map<std::string, Tensor>& grads, double lr,
                 const AdamConfig& cfg = {}) {
    ++step_;
    const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(step_));
    const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(step_));
    for (const auto& name : order_) {
      Entry& e = entries_.at(name);
      const Tensor* g = nullptr;
      auto it = grads.find(name);
      if (it != grads.end()) {
        if (!it->second.same_shape(e.value))
          throw numeric_error("gradient shape mismatch for '" + name + "': " +
                              it->second.shape_str() + " vs " + e.value.shape_str());
        g = &it->second;
      }
      for (std::size_t i = 0; i < e.value.size(); ++i) {
        const double gi = g ? g->data[i] : 0.0;
        e.m.data[i] = cfg.beta1 * e.m.data[i] + (1.0 - cfg.beta1) * gi;
        e.v.data[i] = cfg.beta2 * e.v.data[i] + (1.0 - cfg.beta2) * gi * gi;
        const double mhat = e.m.data[i] / bc1;
        const double vhat = e.v.data[i] / bc2;
        e.value.data[i] -= lr * mhat / (std::sqrt(vhat) + cfg.epsilon);
      }
    }
  }

private:
  std::map<std::string, Entry> entries_;
  std::vector<std::string> order_;
  std::uint64_t step_ = 0;
};

// Xavier-uniform bound for a (rows x cols) matrix.
inline double xavier_bound(std::size_t fan_in, std::size_t fan_out) {
  return std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
}

inline Tensor random_uniform(std::vector<std::size_t> shape, double bound, Rng& rng) {
  Tensor t = Tensor::zeros(std::move(shape));
  for (double& x : t.data) x = uniform(rng, -bound, bound);
  return t;
}

inline Tensor xavier_matrix(std::size_t rows, std::size_t cols, Rng& rng) {
  return random_uniform({rows, cols}, xavier_bound(cols, rows), rng);
}

}  // namespace strex
