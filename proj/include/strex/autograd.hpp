#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "strex/common.hpp"
#include "strex/tensor.hpp"

namespace strex {

// Handle to a node in a Graph tape.
struct Var {
  std::uint32_t id = 0;
};

// Reverse-mode differentiation tape. Values are computed eagerly as ops are
// recorded; backward() walks the tape in reverse and accumulates gradients.
// Named parameter leaves are cached so repeated lookups within one graph
// share a node and their gradients accumulate.
class Graph {
public:
  Graph() = default;
  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;

  Var constant(Tensor v) { return push(std::move(v), nullptr); }

  Var param(const std::string& name, const Tensor& v) {
    auto it = param_cache_.find(name);
    if (it != param_cache_.end()) return Var{it->second};
    Var var = push(v, nullptr);
    param_cache_.emplace(name, var.id);
    param_order_.emplace_back(name, var.id);
    return var;
  }

  bool has_param(const std::string& name) const { return param_cache_.count(name) > 0; }

  const Tensor& value(Var v) const { return nodes_[v.id].value; }
  const Tensor& grad(Var v) const { return nodes_[v.id].grad; }
  std::size_t node_count() const { return nodes_.size(); }

  // Number of times a log argument hit the probability floor.
  std::size_t clamped_log_count() const { return clamped_logs_; }

  Var add(Var a, Var b) {
    check_same_shape(a, b, "add");
    Tensor out = value(a);
    const Tensor& vb = value(b);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += vb[i];
    return push(std::move(out), [this, a, b](const Tensor& g, Tensor&) {
      accumulate(a, g);
      accumulate(b, g);
    });
  }

  Var sub(Var a, Var b) {
    check_same_shape(a, b, "sub");
    Tensor out = value(a);
    const Tensor& vb = value(b);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] -= vb[i];
    return push(std::move(out), [this, a, b](const Tensor& g, Tensor&) {
      accumulate(a, g);
      Tensor neg = g;
      for (double& x : neg.data) x = -x;
      accumulate(b, neg);
    });
  }

  Var mul(Var a, Var b) {
    check_same_shape(a, b, "mul");
    Tensor out = value(a);
    const Tensor& vb = value(b);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] *= vb[i];
    return push(std::move(out), [this, a, b](const Tensor& g, Tensor&) {
      Tensor ga = g, gb = g;
      const Tensor& va = value(a);
      const Tensor& vb2 = value(b);
      for (std::size_t i = 0; i < g.size(); ++i) {
        ga[i] *= vb2[i];
        gb[i] *= va[i];
      }
      accumulate(a, ga);
      accumulate(b, gb);
    });
  }

  Var scale(Var a, double c) {
    Tensor out = value(a);
    for (double& x : out.data) x *= c;
    return push(std::move(out), [this, a, c](const Tensor& g, Tensor&) {
      Tensor ga = g;
      for (double& x : ga.data) x *= c;
      accumulate(a, ga);
    });
  }

  Var add_n(const std::vector<Var>& vars) {
    if (vars.empty()) throw numeric_error("add_n of no terms");
    Tensor out = value(vars[0]);
    for (std::size_t k = 1; k < vars.size(); ++k) {
      const Tensor& v = value(vars[k]);
      if (!out.same_shape(v)) throw numeric_error("add_n shape mismatch");
      for (std::size_t i = 0; i < out.size(); ++i) out[i] += v[i];
    }
    return push(std::move(out), [this, vars](const Tensor& g, Tensor&) {
      for (Var v : vars) accumulate(v, g);
    });
  }

  // y = A x for a (rows x cols) matrix and a cols vector.
  Var matvec(Var a, Var x) {
    const Tensor& va = value(a);
    const Tensor& vx = value(x);
    if (va.rank() != 2 || vx.rank() != 1 || va.cols() != vx.size())
      throw numeric_error("matvec shape mismatch " + va.shape_str() + " * " + vx.shape_str());
    std::size_t r = va.rows(), c = va.cols();
    Tensor out = Tensor::zeros({r});
    for (std::size_t i = 0; i < r; ++i) {
      double acc = 0.0;
      const double* row = va.data.data() + i * c;
      for (std::size_t j = 0; j < c; ++j) acc += row[j] * vx[j];
      out[i] = acc;
    }
    return push(std::move(out), [this, a, x, r, c](const Tensor& g, Tensor&) {
      const Tensor& va2 = value(a);
      const Tensor& vx2 = value(x);
      Tensor ga = Tensor::zeros({r, c});
      Tensor gx = Tensor::zeros({c});
      for (std::size_t i = 0; i < r; ++i) {
        const double gi = g[i];
        const double* row = va2.data.data() + i * c;
        double* garow = ga.data.data() + i * c;
        for (std::size_t j = 0; j < c; ++j) {
          garow[j] += gi * vx2[j];
          gx[j] += gi * row[j];
        }
      }
      accumulate(a, ga);
      accumulate(x, gx);
    });
  }

  // v = H^T w: weighted sum of the rows of H (T x m) with weights w (T).
  Var weighted_row_sum(Var h, Var w) {
    const Tensor& vh = value(h);
    const Tensor& vw = value(w);
    if (vh.rank() != 2 || vw.rank() != 1 || vh.rows() != vw.size())
      throw numeric_error("weighted_row_sum shape mismatch");
    std::size_t t = vh.rows(), m = vh.cols();
    Tensor out = Tensor::zeros({m});
    for (std::size_t i = 0; i < t; ++i) {
      const double wi = vw[i];
      const double* row = vh.data.data() + i * m;
      for (std::size_t j = 0; j < m; ++j) out[j] += wi * row[j];
    }
    return push(std::move(out), [this, h, w, t, m](const Tensor& g, Tensor&) {
      const Tensor& vh2 = value(h);
      const Tensor& vw2 = value(w);
      Tensor gh = Tensor::zeros({t, m});
      Tensor gw = Tensor::zeros({t});
      for (std::size_t i = 0; i < t; ++i) {
        const double wi = vw2[i];
        const double* row = vh2.data.data() + i * m;
        double* ghrow = gh.data.data() + i * m;
        double acc = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
          ghrow[j] += wi * g[j];
          acc += row[j] * g[j];
        }
        gw[i] += acc;
      }
      accumulate(h, gh);
      accumulate(w, gw);
    });
  }

  // Row gather from an embedding table; backward scatter-adds into the table.
  Var rows(Var table, std::vector<std::size_t> ids) {
    const Tensor& vt = value(table);
    if (vt.rank() != 2) throw numeric_error("rows expects a matrix table");
    std::size_t d = vt.cols();
    for (std::size_t id : ids)
      if (id >= vt.rows()) throw numeric_error("row index out of table range");
    Tensor out = Tensor::zeros({ids.size(), d});
    for (std::size_t i = 0; i < ids.size(); ++i)
      std::copy_n(vt.data.data() + ids[i] * d, d, out.data.data() + i * d);
    return push(std::move(out), [this, table, ids = std::move(ids), d](const Tensor& g, Tensor&) {
      Tensor gt = Tensor::zeros(value(table).shape);
      for (std::size_t i = 0; i < ids.size(); ++i) {
        const double* src = g.data.data() + i * d;
        double* dst = gt.data.data() + ids[i] * d;
        for (std::size_t j = 0; j < d; ++j) dst[j] += src[j];
      }
      accumulate(table, gt);
    });
  }

  // Column-wise concatenation of matrices with equal row counts.
  Var concat_cols(const std::vector<Var>& parts) {
    if (parts.empty()) throw numeric_error("concat_cols of no parts");
    std::size_t t = value(parts[0]).rows();
    std::size_t total = 0;
    std::vector<std::size_t> widths;
    for (Var p : parts) {
      const Tensor& v = value(p);
      if (v.rank() != 2 || v.rows() != t) throw numeric_error("concat_cols row mismatch");
      widths.push_back(v.cols());
      total += v.cols();
    }
    Tensor out = Tensor::zeros({t, total});
    std::size_t off = 0;
    for (std::size_t k = 0; k < parts.size(); ++k) {
      const Tensor& v = value(parts[k]);
      for (std::size_t i = 0; i < t; ++i)
        std::copy_n(v.data.data() + i * widths[k], widths[k], out.data.data() + i * total + off);
      off += widths[k];
    }
    return push(std::move(out),
                [this, parts, widths = std::move(widths), t, total](const Tensor& g, Tensor&) {
      std::size_t off2 = 0;
      for (std::size_t k = 0; k < parts.size(); ++k) {
        Tensor gp = Tensor::zeros({t, widths[k]});
        for (std::size_t i = 0; i < t; ++i)
          std::copy_n(g.data.data() + i * total + off2, widths[k], gp.data.data() + i * widths[k]);
        accumulate(parts[k], gp);
        off2 += widths[k];
      }
    });
  }

  Var slice_row(Var m, std::size_t row) {
    const Tensor& vm = value(m);
    if (vm.rank() != 2 || row >= vm.rows()) throw numeric_error("slice_row out of range");
    std::size_t d = vm.cols();
    Tensor out = Tensor::zeros({d});
    std::copy_n(vm.data.data() + row * d, d, out.data.data());
    return push(std::move(out), [this, m, row, d](const Tensor& g, Tensor&) {
      Tensor gm = Tensor::zeros(value(m).shape);
      for (std::size_t j = 0; j < d; ++j) gm.data[row * d + j] = g[j];
      accumulate(m, gm);
    });
  }

  Var stack_rows(const std::vector<Var>& rows_in) {
    if (rows_in.empty()) throw numeric_error("stack_rows of no rows");
    std::size_t d = value(rows_in[0]).size();
    Tensor out = Tensor::zeros({rows_in.size(), d});
    for (std::size_t i = 0; i < rows_in.size(); ++i) {
      const Tensor& v = value(rows_in[i]);
      if (v.rank() != 1 || v.size() != d) throw numeric_error("stack_rows shape mismatch");
      std::copy_n(v.data.data(), d, out.data.data() + i * d);
    }
    return push(std::move(out), [this, rows_in, d](const Tensor& g, Tensor&) {
      for (std::size_t i = 0; i < rows_in.size(); ++i) {
        Tensor gr = Tensor::zeros({d});
        std::copy_n(g.data.data() + i * d, d, gr.data.data());
        accumulate(rows_in[i], gr);
      }
    });
  }

  Var sigmoid(Var a) {
    Tensor out = value(a);
    for (double& x : out.data) x = 1.0 / (1.0 + std::exp(-x));
    return push(std::move(out), [this, a](const Tensor& g, Tensor& y) {
      Tensor ga = g;
      for (std::size_t i = 0; i < g.size(); ++i) ga[i] *= y[i] * (1.0 - y[i]);
      accumulate(a, ga);
    });
  }

  Var tanh_op(Var a) {
    Tensor out = value(a);
    for (double& x : out.data) x = std::tanh(x);
    return push(std::move(out), [this, a](const Tensor& g, Tensor& y) {
      Tensor ga = g;
      for (std::size_t i = 0; i < g.size(); ++i) ga[i] *= 1.0 - y[i] * y[i];
      accumulate(a, ga);
    });
  }

  // Stable softmax over a vector of scores.
  Var softmax_op(Var s) {
    const Tensor& vs = value(s);
    if (vs.rank() != 1) throw numeric_error("softmax_op expects a vector");
    Tensor out = Tensor::vector(softmax(vs.data));
    return push(std::move(out), [this, s](const Tensor& g, Tensor& p) {
      double dot = 0.0;
      for (std::size_t i = 0; i < g.size(); ++i) dot += g[i] * p[i];
      Tensor gs = g;
      for (std::size_t i = 0; i < g.size(); ++i) gs[i] = p[i] * (g[i] - dot);
      accumulate(s, gs);
    });
  }

  // -log(p[gold]) / norm with the probability floor applied before the log.
  Var neg_log_pick(Var p, std::size_t gold, double norm) {
    const Tensor& vp = value(p);
    if (gold >= vp.size()) throw numeric_error("neg_log_pick: class out of range");
    double prob = vp[gold];
    if (prob < kProbFloor) {
      prob = kProbFloor;
      ++clamped_logs_;
    }
    Tensor out = Tensor::scalar(-std::log(prob) / norm);
    return push(std::move(out), [this, p, gold, norm, prob](const Tensor& g, Tensor&) {
      Tensor gp = Tensor::zeros(value(p).shape);
      gp[gold] = -g[0] / (prob * norm);
      accumulate(p, gp);
    });
  }

  Var sum(Var a) {
    const Tensor& va = value(a);
    double acc = 0.0;
    for (double x : va.data) acc += x;
    return push(Tensor::scalar(acc), [this, a](const Tensor& g, Tensor&) {
      Tensor ga = Tensor::zeros(value(a).shape);
      for (double& x : ga.data) x = g[0];
      accumulate(a, ga);
    });
  }

  Var sum_squares(Var a) {
    const Tensor& va = value(a);
    double acc = 0.0;
    for (double x : va.data) acc += x * x;
    return push(Tensor::scalar(acc), [this, a](const Tensor& g, Tensor&) {
      const Tensor& va2 = value(a);
      Tensor ga = va2;
      for (double& x : ga.data) x *= 2.0 * g.data[0];
      accumulate(a, ga);
    });
  }

  Var dot(Var a, Var b) {
    check_same_shape(a, b, "dot");
    const Tensor& va = value(a);
    const Tensor& vb = value(b);
    double acc = 0.0;
    for (std::size_t i = 0; i < va.size(); ++i) acc += va[i] * vb[i];
    return push(Tensor::scalar(acc), [this, a, b](const Tensor& g, Tensor&) {
      const Tensor& va2 = value(a);
      const Tensor& vb2 = value(b);
      Tensor ga = vb2, gb = va2;
      for (double& x : ga.data) x *= g[0];
      for (double& x : gb.data) x *= g[0];
      accumulate(a, ga);
      accumulate(b, gb);
    });
  }

  // Inverted dropout recorded on the tape; the mask is drawn once at forward
  // time and reused in backward.
  Var dropout_op(Var a, double p, Rng& rng) {
    if (!(p > 0.0 && p < 1.0)) throw numeric_error("dropout probability must be in (0,1)");
    const Tensor& va = value(a);
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    std::vector<double> mask(va.size());
    double keep = 1.0 - p;
    for (double& m : mask) m = dist(rng) < p ? 0.0 : 1.0 / keep;
    Tensor out = va;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] *= mask[i];
    return push(std::move(out), [this, a, mask = std::move(mask)](const Tensor& g, Tensor&) {
      Tensor ga = g;
      for (std::size_t i = 0; i < ga.size(); ++i) ga[i] *= mask[i];
      accumulate(a, ga);
    });
  }

  // Reverse-mode sweep from a scalar loss. Gradients of all nodes on the
  // tape are reset first, so backward may be called more than once per graph.
  void backward(Var loss) {
    if (value(loss).size() != 1)
      throw numeric_error("backward requires a scalar loss, got shape " + value(loss).shape_str());
    for (Node& n : nodes_) {
      n.grad = Tensor::zeros(n.value.shape);
    }
    nodes_[loss.id].grad.data[0] = 1.0;
    for (std::uint32_t i = loss.id + 1; i-- > 0;) {
      Node& n = nodes_[i];
      if (n.back && !is_zero(n.grad)) n.back(n.grad, n.value);
    }
  }

  // Gradient of a named parameter; zero tensor when the parameter never
  // appeared on this graph.
  Tensor param_grad(const std::string& name, const Tensor& like) const {
    auto it = param_cache_.find(name);
    if (it == param_cache_.end()) return Tensor::zeros(like.shape);
    const Tensor& g = nodes_[it->second].grad;
    if (g.data.empty()) return Tensor::zeros(like.shape);
    return g;
  }

  const std::vector<std::pair<std::string, std::uint32_t>>& params() const {
    return param_order_;
  }

private:
  struct Node {
    Tensor value;
    Tensor grad;
    std::function<void(const Tensor& grad, Tensor& value)> back;
  };

  static bool is_zero(const Tensor& t) {
    for (double x : t.data)
      if (x != 0.0) return false;
    return true;
  }

  Var push(Tensor v, std::function<void(const Tensor&, Tensor&)> back) {
    nodes_.push_back(Node{std::move(v), Tensor{}, std::move(back)});
    return Var{static_cast<std::uint32_t>(nodes_.size() - 1)};
  }

  void accumulate(Var v, const Tensor& g) {
    Tensor& dst = nodes_[v.id].grad;
    for (std::size_t i = 0; i < dst.size(); ++i) dst.data[i] += g.data[i];
  }

  void check_same_shape(Var a, Var b, const char* op) const {
    if (!value(a).same_shape(value(b)))
      throw numeric_error(std::string(op) + " shape mismatch " + value(a).shape_str() + " vs " +
                          value(b).shape_str());
  }

  std::vector<Node> nodes_;
  std::unordered_map<std::string, std::uint32_t> param_cache_;
  std::vector<std::pair<std::string, std::uint32_t>> param_order_;
  std::size_t clamped_logs_ = 0;
};

}  // namespace strex
