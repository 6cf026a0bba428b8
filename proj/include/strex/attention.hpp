#pragma once

#include <vector>

#include "strex/autograd.hpp"
#include "strex/tensor.hpp"

namespace strex {

// {0,1} weights over a pruned sentence: 1 exactly for tokens inside the head
// or tail entity span.
inline std::vector<double> entity_mask(std::size_t length,
                                       const std::vector<std::size_t>& head_positions,
                                       const std::vector<std::size_t>& tail_positions) {
  std::vector<double> mask(length, 0.0);
  for (std::size_t p : head_positions) mask.at(p) = 1.0;
  for (std::size_t p : tail_positions) mask.at(p) = 1.0;
  return mask;
}

// Word-level attention distribution: softmax over scores h_t . (A r).
inline Var word_attention(Graph& g, Var hidden, Var word_map, Var word_query) {
  Var query = g.matvec(word_map, word_query);
  Var scores = g.matvec(hidden, query);
  return g.softmax_op(scores);
}

// Sentence representation: sum_t (alpha_t + mask_t) h_t. The combined weights
// are deliberately not renormalized after adding the entity mask.
inline Var sentence_repr(Graph& g, Var hidden, Var word_alpha, Var entity_weights) {
  return g.weighted_row_sum(hidden, g.add(word_alpha, entity_weights));
}

// Selective attention over a bag: softmax over S_i . (A r), then the weighted
// sum of instance representations. reprs is a (B x m) matrix.
inline Var bag_attention(Graph& g, Var reprs, Var sent_map, Var sent_query) {
  Var query = g.matvec(sent_map, sent_query);
  Var scores = g.matvec(reprs, query);
  Var alpha = g.softmax_op(scores);
  return g.weighted_row_sum(reprs, alpha);
}

}  // namespace strex
