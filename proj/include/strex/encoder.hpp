#pragma once

#include <vector>

#include "strex/autograd.hpp"
#include "strex/tensor.hpp"

namespace strex {

// Update/reset/candidate weights of one GRU direction, already registered on
// a graph. Input matrices are (m x d), recurrent matrices (m x m), biases m.
struct GruVars {
  Var w_update, u_update, b_update;
  Var w_reset, u_reset, b_reset;
  Var w_cand, u_cand, b_cand;
};

// Word and position rows of one pruned instance: inputs to the encoder.
struct TokenIndices {
  std::vector<std::size_t> words;
  std::vector<std::size_t> pos_head;
  std::vector<std::size_t> pos_tail;
};

// [word; pos1; pos2] concatenation per token: a (T x (k+2l)) input matrix.
inline Var embed(Graph& g, Var word_table, Var pos_head_table, Var pos_tail_table,
                 const TokenIndices& ids) {
  Var w = g.rows(word_table, ids.words);
  Var p1 = g.rows(pos_head_table, ids.pos_head);
  Var p2 = g.rows(pos_tail_table, ids.pos_tail);
  return g.concat_cols({w, p1, p2});
}

// One gated-recurrent step: update gate, reset gate, tanh candidate, convex
// combination with the previous state.
inline Var gru_step(Graph& g, const GruVars& w, Var x, Var h) {
  Var z = g.sigmoid(g.add(g.add(g.matvec(w.w_update, x), g.matvec(w.u_update, h)), w.b_update));
  Var r = g.sigmoid(g.add(g.add(g.matvec(w.w_reset, x), g.matvec(w.u_reset, h)), w.b_reset));
  Var cand = g.tanh_op(
      g.add(g.add(g.matvec(w.w_cand, x), g.matvec(w.u_cand, g.mul(r, h))), w.b_cand));
  // h' = h + z * (cand - h)
  return g.add(h, g.mul(z, g.sub(cand, h)));
}

// Left-to-right recurrence over the rows of a (T x d) input matrix, starting
// from a zero state. Returns one hidden state per time step.
inline std::vector<Var> gru_forward(Graph& g, Var inputs, const GruVars& w, std::size_t m) {
  std::size_t T = g.value(inputs).rows();
  Var h = g.constant(Tensor::zeros({m}));
  std::vector<Var> states;
  states.reserve(T);
  for (std::size_t t = 0; t < T; ++t) {
    h = gru_step(g, w, g.slice_row(inputs, t), h);
    states.push_back(h);
  }
  return states;
}

// Bidirectional encoder: the t-th output is the element-wise sum of the
// forward state at t and the backward state at t. Output is (T x m).
inline Var bgru(Graph& g, Var inputs, const GruVars& fwd, const GruVars& bwd, std::size_t m) {
  std::size_t T = g.value(inputs).rows();
  std::vector<Var> forward = gru_forward(g, inputs, fwd, m);
  Var h = g.constant(Tensor::zeros({m}));
  std::vector<Var> backward(T);
  for (std::size_t t = T; t-- > 0;) {
    h = gru_step(g, bwd, g.slice_row(inputs, t), h);
    backward[t] = h;
  }
  std::vector<Var> combined(T);
  for (std::size_t t = 0; t < T; ++t) combined[t] = g.add(forward[t], backward[t]);
  return g.stack_rows(combined);
}

}  // namespace strex
