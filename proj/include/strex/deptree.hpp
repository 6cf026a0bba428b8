#pragma once

#include <algorithm>
#include <cstddef>
#include <string>
#include <vector>

#include "strex/common.hpp"

namespace strex {

// Sentinel head index marking the root token.
inline constexpr int kRoot = -1;

// Rooted dependency tree over sentence tokens. parent[i] is the head token
// index of token i, or kRoot for the single root. Immutable after validation.
class DepTree {
public:
  // Validates single-rootedness, head ranges and acyclicity.
  static DepTree validate(std::vector<int> parent) {
    const std::size_t n = parent.size();
    if (n == 0) throw data_error("dependency tree has no tokens");
    std::size_t roots = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (parent[i] == kRoot) {
        ++roots;
      } else if (parent[i] < 0 || static_cast<std::size_t>(parent[i]) >= n) {
        throw data_error("token " + std::to_string(i) + " has out-of-range head " +
                         std::to_string(parent[i]));
      }
    }
    if (roots == 0) throw data_error("dependency tree has no root");
    if (roots > 1) throw data_error("dependency tree has multiple roots");
    // A walk from any node must reach the root within n steps.
    for (std::size_t i = 0; i < n; ++i) {
      int cur = static_cast<int>(i);
      std::size_t steps = 0;
      while (cur != kRoot) {
        cur = parent[cur];
        if (++steps > n) throw data_error("cycle in dependency tree at token " + std::to_string(i));
      }
    }
    return DepTree(std::move(parent));
  }

  std::size_t size() const { return parent_.size(); }
  int parent(std::size_t i) const { return parent_[i]; }
  const std::vector<int>& parents() const { return parent_; }

  std::size_t root() const {
    for (std::size_t i = 0; i < parent_.size(); ++i)
      if (parent_[i] == kRoot) return i;
    return 0;  // unreachable after validation
  }

  // Depth of a node (root has depth 0).
  std::size_t depth(std::size_t i) const {
    std::size_t d = 0;
    int cur = static_cast<int>(i);
    while (parent_[cur] != kRoot) {
      cur = parent_[cur];
      ++d;
    }
    return d;
  }

  // Lowest common ancestor; a node is its own ancestor.
  std::size_t lca(std::size_t a, std::size_t b) const {
    std::size_t da = depth(a), db = depth(b);
    int x = static_cast<int>(a), y = static_cast<int>(b);
    while (da > db) { x = parent_[x]; --da; }
    while (db > da) { y = parent_[y]; --db; }
    while (x != y) { x = parent_[x]; y = parent_[y]; }
    return static_cast<std::size_t>(x);
  }

  // All tokens in the subtree rooted at r, sorted by original index.
  std::vector<std::size_t> subtree(std::size_t r) const {
    const std::size_t n = parent_.size();
    std::vector<std::vector<std::size_t>> children(n);
    for (std::size_t i = 0; i < n; ++i)
      if (parent_[i] != kRoot) children[parent_[i]].push_back(i);
    std::vector<std::size_t> out;
    std::vector<std::size_t> stack{r};
    while (!stack.empty()) {
      std::size_t cur = stack.back();
      stack.pop_back();
      out.push_back(cur);
      for (std::size_t c : children[cur]) stack.push_back(c);
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  // Tokens on the tree path a -> lca -> b, sorted by original index.
  std::vector<std::size_t> path_through_lca(std::size_t a, std::size_t b) const {
    std::size_t anc = lca(a, b);
    std::vector<std::size_t> out;
    for (int cur = static_cast<int>(a); cur != static_cast<int>(anc); cur = parent_[cur])
      out.push_back(static_cast<std::size_t>(cur));
    for (int cur = static_cast<int>(b); cur != static_cast<int>(anc); cur = parent_[cur])
      out.push_back(static_cast<std::size_t>(cur));
    out.push_back(anc);
    std::sort(out.begin(), out.end());
    return out;
  }

private:
  explicit DepTree(std::vector<int> parent) : parent_(std::move(parent)) {}
  std::vector<int> parent_;
};

// A sentence pruned to a token subset, with entity anchors and relative
// position features recomputed on the kept sequence.
struct PrunedSentence {
  std::vector<std::size_t> kept;  // original token indices, strictly increasing
  std::size_t head_anchor = 0;    // position within kept
  std::size_t tail_anchor = 0;    // position within kept
  std::vector<int> pos_head;      // signed distance to head anchor, clipped
  std::vector<int> pos_tail;      // signed distance to tail anchor, clipped
};

// Signed offsets of every kept position from the two anchors, clipped to
// [-clip, +clip].
inline std::pair<std::vector<int>, std::vector<int>> relative_positions(
    std::size_t kept_length, std::size_t head_anchor, std::size_t tail_anchor, int clip) {
  if (head_anchor >= kept_length || tail_anchor >= kept_length)
    throw data_error("entity anchor outside pruned sentence");
  auto clamp = [clip](long d) {
    return static_cast<int>(std::max<long>(-clip, std::min<long>(clip, d)));
  };
  std::vector<int> p1(kept_length), p2(kept_length);
  for (std::size_t i = 0; i < kept_length; ++i) {
    p1[i] = clamp(static_cast<long>(i) - static_cast<long>(head_anchor));
    p2[i] = clamp(static_cast<long>(i) - static_cast<long>(tail_anchor));
  }
  return {std::move(p1), std::move(p2)};
}

namespace detail {
inline PrunedSentence make_pruned(std::vector<std::size_t> kept, std::size_t head_tok,
                                  std::size_t tail_tok, int clip) {
  PrunedSentence out;
  out.kept = std::move(kept);
  auto index_of = [&](std::size_t tok) {
    auto it = std::lower_bound(out.kept.begin(), out.kept.end(), tok);
    if (it == out.kept.end() || *it != tok)
      throw data_error("entity anchor dropped by pruning");
    return static_cast<std::size_t>(it - out.kept.begin());
  };
  out.head_anchor = index_of(head_tok);
  out.tail_anchor = index_of(tail_tok);
  auto pos = relative_positions(out.kept.size(), out.head_anchor, out.tail_anchor, clip);
  out.pos_head = std::move(pos.first);
  out.pos_tail = std::move(pos.second);
  return out;
}
}  // namespace detail

// Sub-tree parse: keep the subtree rooted at the parent of the entities'
// lowest common ancestor, in original order. When the LCA is the root the
// whole sentence is kept.
inline PrunedSentence stp(const DepTree& tree, std::size_t head_anchor, std::size_t tail_anchor,
                          int clip = 30) {
  std::size_t anc = tree.lca(head_anchor, tail_anchor);
  std::size_t top = tree.parent(anc) == kRoot ? anc : static_cast<std::size_t>(tree.parent(anc));
  return detail::make_pruned(tree.subtree(top), head_anchor, tail_anchor, clip);
}

// Shortest dependency path: keep only the tokens on the tree path between the
// two anchors through their LCA, in original order.
inline PrunedSentence sdp(const DepTree& tree, std::size_t head_anchor, std::size_t tail_anchor,
                          int clip = 30) {
  return detail::make_pruned(tree.path_through_lca(head_anchor, tail_anchor), head_anchor,
                             tail_anchor, clip);
}

// Degenerate pruning that keeps the whole sentence.
inline PrunedSentence keep_all(std::size_t n, std::size_t head_anchor, std::size_t tail_anchor,
                               int clip = 30) {
  std::vector<std::size_t> kept(n);
  for (std::size_t i = 0; i < n; ++i) kept[i] = i;
  return detail::make_pruned(std::move(kept), head_anchor, tail_anchor, clip);
}

}  // namespace strex
