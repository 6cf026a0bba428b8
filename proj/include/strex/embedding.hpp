#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "strex/common.hpp"
#include "strex/corpus.hpp"
#include "strex/params.hpp"
#include "strex/tensor.hpp"

namespace strex {

// Word vocabulary with dedicated UNK and PAD rows at the end of the table.
class Vocab {
public:
  Vocab() = default;
  explicit Vocab(std::vector<std::string> words) : words_(std::move(words)) {
    for (std::size_t i = 0; i < words_.size(); ++i) ids_.emplace(words_[i], i);
  }

  static Vocab from_instances(const std::vector<Instance>& instances) {
    Vocab v;
    for (const auto& inst : instances)
      for (const auto& tok : inst.tokens) v.add(tok);
    return v;
  }

  std::size_t add(const std::string& word) {
    auto it = ids_.find(word);
    if (it != ids_.end()) return it->second;
    std::size_t id = words_.size();
    ids_.emplace(word, id);
    words_.push_back(word);
    return id;
  }

  // Lookup falls back to the UNK row.
  std::size_t id(const std::string& word) const {
    auto it = ids_.find(word);
    return it == ids_.end() ? unk_id() : it->second;
  }
  bool contains(const std::string& word) const { return ids_.count(word) > 0; }

  std::size_t unk_id() const { return words_.size(); }
  std::size_t pad_id() const { return words_.size() + 1; }
  std::size_t table_rows() const { return words_.size() + 2; }
  std::size_t size() const { return words_.size(); }
  const std::vector<std::string>& words() const { return words_; }

private:
  std::vector<std::string> words_;
  std::unordered_map<std::string, std::size_t> ids_;
};

// Pretrained embeddings in the usual text format: an optional "count dim"
// header line, then one "word v1 ... vk" line per word.
struct PretrainedEmbeddings {
  std::size_t dim = 0;
  std::unordered_map<std::string, std::vector<double>> vectors;
};

inline PretrainedEmbeddings load_text_embeddings(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw data_error("cannot open embedding file: " + path);
  PretrainedEmbeddings out;
  std::string line;
  std::size_t line_no = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream iss(line);
    if (first) {
      first = false;
      // Header detection: exactly two numeric tokens.
      std::size_t count, dim;
      std::string rest;
      std::istringstream probe(line);
      if ((probe >> count >> dim) && !(probe >> rest)) {
        out.dim = dim;
        continue;
      }
    }
    std::string word;
    iss >> word;
    std::vector<double> v;
    double x;
    while (iss >> x) v.push_back(x);
    if (v.empty()) throw data_error(path + ":" + std::to_string(line_no) + ": no vector values");
    if (out.dim == 0) out.dim = v.size();
    if (v.size() != out.dim)
      throw data_error(path + ":" + std::to_string(line_no) + ": expected " +
                       std::to_string(out.dim) + " values, got " + std::to_string(v.size()));
    out.vectors[word] = std::move(v);
  }
  if (out.vectors.empty()) throw data_error(path + ": embedding file has no vectors");
  return out;
}

// Number of rows in the position tables: clipped distances in [-clip, clip]
// plus one PAD row.
inline std::size_t position_rows(int clip) { return 2 * static_cast<std::size_t>(clip) + 2; }

// Table row for a clipped signed distance.
inline std::size_t position_row(int distance, int clip) {
  int d = std::max(-clip, std::min(clip, distance));
  return static_cast<std::size_t>(d + clip);
}

// Fresh word table: uniform +-0.25 rows, PAD row zero. Rows of words found in
// the pretrained file are overwritten with the stored vectors.
inline Tensor init_word_table(const Vocab& vocab, std::size_t dim, Rng& rng,
                              const PretrainedEmbeddings* pretrained = nullptr) {
  Tensor table = random_uniform({vocab.table_rows(), dim}, 0.25, rng);
  for (std::size_t j = 0; j < dim; ++j) table.at(vocab.pad_id(), j) = 0.0;
  if (pretrained) {
    if (pretrained->dim != dim)
      throw data_error("pretrained embedding dimension " + std::to_string(pretrained->dim) +
                       " does not match word dimension " + std::to_string(dim));
    for (std::size_t w = 0; w < vocab.size(); ++w) {
      auto it = pretrained->vectors.find(vocab.words()[w]);
      if (it == pretrained->vectors.end()) continue;
      for (std::size_t j = 0; j < dim; ++j) table.at(w, j) = it->second[j];
    }
  }
  return table;
}

}  // namespace strex
