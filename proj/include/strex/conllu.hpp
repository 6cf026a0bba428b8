#pragma once

#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "strex/common.hpp"
#include "strex/deptree.hpp"

namespace strex {

// One parsed sentence from a CoNLL-U file. Only the ID and HEAD columns are
// consumed; FORM is kept for cross-checking token counts.
struct ConlluSentence {
  std::string sent_id;
  std::vector<std::string> forms;
  std::vector<int> parents;  // kRoot for HEAD == 0
};

namespace detail {
inline bool is_plain_token_id(const std::string& id) {
  // Multi-word tokens carry range ids like "3-4", empty nodes ids like "3.1".
  if (id.empty()) return false;
  for (char c : id)
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  return true;
}
}  // namespace detail

inline std::vector<ConlluSentence> parse_conllu(std::istream& in, const std::string& source) {
  std::vector<ConlluSentence> out;
  ConlluSentence cur;
  bool in_sentence = false;
  std::string line;
  std::size_t line_no = 0;

  auto flush = [&]() {
    if (in_sentence && !cur.parents.empty()) out.push_back(std::move(cur));
    cur = ConlluSentence{};
    in_sentence = false;
  };

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      flush();
      continue;
    }
    if (line[0] == '#') {
      const std::string key = "# sent_id";
      if (line.compare(0, key.size(), key) == 0) {
        auto eq = line.find('=');
        if (eq != std::string::npos) {
          std::size_t b = line.find_first_not_of(' ', eq + 1);
          cur.sent_id = b == std::string::npos ? "" : line.substr(b);
        }
      }
      in_sentence = true;
      continue;
    }
    std::vector<std::string> cols;
    std::stringstream ss(line);
    std::string col;
    while (std::getline(ss, col, '\t')) cols.push_back(col);
    if (cols.size() < 8)
      throw data_error(source + ":" + std::to_string(line_no) + ": expected 10 tab-separated columns");
    if (!detail::is_plain_token_id(cols[0])) continue;  // skip MWT ranges and empty nodes
    in_sentence = true;
    std::size_t id = std::stoul(cols[0]);
    if (id != cur.parents.size() + 1)
      throw data_error(source + ":" + std::to_string(line_no) + ": non-consecutive token id " + cols[0]);
    cur.forms.push_back(cols[1]);
    int head;
    try {
      head = std::stoi(cols[6]);
    } catch (const std::exception&) {
      throw data_error(source + ":" + std::to_string(line_no) + ": HEAD column is not an integer");
    }
    cur.parents.push_back(head == 0 ? kRoot : head - 1);
  }
  flush();
  return out;
}

// Reads a CoNLL-U file into validated trees keyed by sent_id.
struct ParseBank {
  std::map<std::string, DepTree> trees;
  std::map<std::string, std::vector<std::string>> forms;

  bool contains(const std::string& id) const { return trees.count(id) > 0; }
  const DepTree& tree(const std::string& id) const {
    auto it = trees.find(id);
    if (it == trees.end()) throw data_error("no parse for sentence id '" + id + "'");
    return it->second;
  }
};

inline ParseBank load_conllu(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw data_error("cannot open CoNLL-U file: " + path);
  ParseBank bank;
  for (auto& sent : parse_conllu(in, path)) {
    if (sent.sent_id.empty())
      throw data_error(path + ": sentence without '# sent_id' comment");
    try {
      bank.trees.emplace(sent.sent_id, DepTree::validate(sent.parents));
    } catch (const data_error& e) {
      throw data_error(path + ": sentence '" + sent.sent_id + "': " + e.what());
    }
    bank.forms.emplace(sent.sent_id, std::move(sent.forms));
  }
  return bank;
}

inline void write_conllu(std::ostream& out, const std::string& sent_id,
                         const std::vector<std::string>& tokens, const std::vector<int>& parents) {
  out << "# sent_id = " << sent_id << "\n";
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    int head = parents[i] == kRoot ? 0 : parents[i] + 1;
    out << (i + 1) << '\t' << tokens[i] << "\t_\t_\t_\t_\t" << head << "\tdep\t_\t_\n";
  }
  out << "\n";
}

}  // namespace strex
