#pragma once

#include <string>
#include <vector>

#include "strex/config.hpp"
#include "strex/conllu.hpp"
#include "strex/corpus.hpp"
#include "strex/deptree.hpp"
#include "strex/embedding.hpp"

namespace strex {

// Pruned-sentence view of one instance, plus entity span positions in pruned
// coordinates.
struct PrunedInstance {
  PrunedSentence sentence;
  std::vector<std::size_t> head_positions;  // kept positions inside the head span
  std::vector<std::size_t> tail_positions;
};

// Anchor = first token of the entity span.
inline PrunedInstance prune_instance(const Instance& inst, const DepTree* tree, PruneMode mode,
                                     int clip) {
  if (mode != PruneMode::none && tree == nullptr)
    throw data_error("instance '" + inst.id + "' needs a dependency parse for pruning");
  if (tree && tree->size() != inst.tokens.size())
    throw data_error("instance '" + inst.id + "' has " + std::to_string(inst.tokens.size()) +
                     " tokens but its parse has " + std::to_string(tree->size()));
  PrunedInstance out;
  switch (mode) {
    case PruneMode::stp:
      out.sentence = stp(*tree, inst.head.start, inst.tail.start, clip);
      break;
    case PruneMode::sdp:
      out.sentence = sdp(*tree, inst.head.start, inst.tail.start, clip);
      break;
    case PruneMode::none:
      out.sentence = keep_all(inst.tokens.size(), inst.head.start, inst.tail.start, clip);
      break;
  }
  for (std::size_t i = 0; i < out.sentence.kept.size(); ++i) {
    std::size_t orig = out.sentence.kept[i];
    if (orig >= inst.head.start && orig < inst.head.end) out.head_positions.push_back(i);
    if (orig >= inst.tail.start && orig < inst.tail.end) out.tail_positions.push_back(i);
  }
  return out;
}

// Pruned instance as a standalone record: kept tokens, remapped spans, and
// the kept-index array. Feeding the result back through any loader with
// mode=none reproduces the pruned view.
inline Instance prune_instance_record(const Instance& inst, const DepTree& tree, PruneMode mode,
                                      int clip) {
  PrunedInstance pruned = prune_instance(inst, &tree, mode, clip);
  Instance out;
  out.id = inst.id;
  out.relation = inst.relation;
  out.parse_ref = inst.parse_ref;
  out.kept = pruned.sentence.kept;
  out.tokens.reserve(out.kept.size());
  for (std::size_t orig : out.kept) out.tokens.push_back(inst.tokens[orig]);
  // Span tokens that survive pruning occupy consecutive kept positions.
  out.head = Span{pruned.head_positions.front(), pruned.head_positions.back() + 1};
  out.tail = Span{pruned.tail_positions.front(), pruned.tail_positions.back() + 1};
  return out;
}

// Encoder-ready indices for one pruned instance.
struct PreparedInstance {
  TokenIndices indices;
  std::vector<std::size_t> head_positions;
  std::vector<std::size_t> tail_positions;
  std::size_t original_length = 0;
};

inline PreparedInstance prepare_instance(const Instance& inst, const DepTree* tree, PruneMode mode,
                                         int clip, const Vocab& vocab) {
  PrunedInstance pruned = prune_instance(inst, tree, mode, clip);
  PreparedInstance out;
  out.head_positions = std::move(pruned.head_positions);
  out.tail_positions = std::move(pruned.tail_positions);
  out.original_length = inst.tokens.size();
  const PrunedSentence& s = pruned.sentence;
  out.indices.words.reserve(s.kept.size());
  for (std::size_t orig : s.kept) out.indices.words.push_back(vocab.id(inst.tokens[orig]));
  out.indices.pos_head.reserve(s.kept.size());
  out.indices.pos_tail.reserve(s.kept.size());
  for (std::size_t i = 0; i < s.kept.size(); ++i) {
    out.indices.pos_head.push_back(position_row(s.pos_head[i], clip));
    out.indices.pos_tail.push_back(position_row(s.pos_tail[i], clip));
  }
  return out;
}

// Looks up the tree for an instance, or null under mode=none. Collects every
// unmatched instance id into `missing` instead of throwing, so callers can
// report them all at once.
inline const DepTree* tree_for(const Instance& inst, const ParseBank& bank, PruneMode mode,
                               std::vector<std::string>* missing) {
  if (mode == PruneMode::none) return nullptr;
  if (!bank.contains(inst.parse_ref)) {
    if (missing) missing->push_back(inst.id);
    return nullptr;
  }
  return &bank.tree(inst.parse_ref);
}

inline void require_no_missing(const std::vector<std::string>& missing) {
  if (missing.empty()) return;
  std::string msg = "missing parses for " + std::to_string(missing.size()) + " instance(s):";
  for (std::size_t i = 0; i < missing.size() && i < 10; ++i) msg += " " + missing[i];
  if (missing.size() > 10) msg += " ...";
  throw data_error(msg);
}

}  // namespace strex
