#pragma once

#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "strex/common.hpp"

namespace strex {

// Token index range [start, end).
struct Span {
  std::size_t start = 0;
  std::size_t end = 0;
  std::size_t size() const { return end - start; }
};

// One sentence with marked head/tail entity spans and a relation label.
struct Instance {
  std::string id;
  std::vector<std::string> tokens;
  Span head;
  Span tail;
  std::string relation;
  std::string parse_ref;             // sentence id of the matching DepTree
  std::vector<std::size_t> kept;     // original indices, present in pruned exports

  std::string head_surface() const { return join_span(head); }
  std::string tail_surface() const { return join_span(tail); }

  bool operator==(const Instance& o) const {
    return id == o.id && tokens == o.tokens && head.start == o.head.start &&
           head.end == o.head.end && tail.start == o.tail.start && tail.end == o.tail.end &&
           relation == o.relation && parse_ref == o.parse_ref && kept == o.kept;
  }

private:
  std::string join_span(const Span& s) const {
    std::string out;
    for (std::size_t i = s.start; i < s.end; ++i) {
      if (i > s.start) out += ' ';
      out += tokens[i];
    }
    return out;
  }
};

// Relation label strings mapped to dense ids. Always contains "NA".
class RelationVocab {
public:
  static constexpr const char* kNA = "NA";

  RelationVocab() = default;
  explicit RelationVocab(const std::vector<std::string>& labels) {
    for (const auto& l : labels) add(l);
    if (!contains(kNA)) throw data_error("relation vocabulary must contain NA");
  }

  std::size_t add(const std::string& label) {
    auto it = ids_.find(label);
    if (it != ids_.end()) return it->second;
    std::size_t id = labels_.size();
    ids_.emplace(label, id);
    labels_.push_back(label);
    return id;
  }

  bool contains(const std::string& label) const { return ids_.count(label) > 0; }
  std::size_t id(const std::string& label) const {
    auto it = ids_.find(label);
    if (it == ids_.end()) throw data_error("unknown relation label '" + label + "'");
    return it->second;
  }
  const std::string& label(std::size_t id) const { return labels_.at(id); }
  std::size_t na_id() const { return id(kNA); }
  std::size_t size() const { return labels_.size(); }
  const std::vector<std::string>& labels() const { return labels_; }

private:
  std::unordered_map<std::string, std::size_t> ids_;
  std::vector<std::string> labels_;
};

// Maps every relation to a (head type, tail type) pair. Type ids are dense
// per side; "NA" maps to the NA type on both sides.
class TypeMapping {
public:
  static constexpr const char* kNAType = "NA";

  void add(const std::string& relation, const std::string& head_type,
           const std::string& tail_type) {
    pairs_[relation] = {intern(head_types_, head_type_ids_, head_type),
                        intern(tail_types_, tail_type_ids_, tail_type)};
  }

  bool contains(const std::string& relation) const { return pairs_.count(relation) > 0; }

  std::pair<std::size_t, std::size_t> types_of(const std::string& relation) const {
    auto it = pairs_.find(relation);
    if (it == pairs_.end())
      throw data_error("relation '" + relation + "' has no type mapping");
    return it->second;
  }

  std::size_t head_type_count() const { return head_types_.size(); }
  std::size_t tail_type_count() const { return tail_types_.size(); }
  const std::vector<std::string>& head_types() const { return head_types_; }
  const std::vector<std::string>& tail_types() const { return tail_types_; }

  // Relations in insertion order; doubles as the relation vocabulary source.
  const std::vector<std::string>& relations() const { return relation_order_; }
  void note_relation(const std::string& r) { relation_order_.push_back(r); }

private:
  static std::size_t intern(std::vector<std::string>& names,
                            std::unordered_map<std::string, std::size_t>& ids,
                            const std::string& name) {
    auto it = ids.find(name);
    if (it != ids.end()) return it->second;
    std::size_t id = names.size();
    ids.emplace(name, id);
    names.push_back(name);
    return id;
  }

  std::map<std::string, std::pair<std::size_t, std::size_t>> pairs_;
  std::vector<std::string> relation_order_;
  std::vector<std::string> head_types_, tail_types_;
  std::unordered_map<std::string, std::size_t> head_type_ids_, tail_type_ids_;
};

// type_mapping.tsv: relation \t head_type \t tail_type
inline TypeMapping load_type_mapping(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw data_error("cannot open type mapping file: " + path);
  TypeMapping mapping;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string relation, head_type, tail_type;
    if (!std::getline(ss, relation, '\t') || !std::getline(ss, head_type, '\t') ||
        !std::getline(ss, tail_type, '\t'))
      throw data_error(path + ":" + std::to_string(line_no) + ": expected 3 tab-separated fields");
    if (mapping.contains(relation))
      throw data_error(path + ":" + std::to_string(line_no) + ": duplicate relation '" + relation + "'");
    mapping.add(relation, head_type, tail_type);
    mapping.note_relation(relation);
  }
  if (!mapping.contains(RelationVocab::kNA))
    throw data_error(path + ": mapping must include the NA relation");
  return mapping;
}

inline void save_type_mapping(const std::string& path, const TypeMapping& mapping) {
  std::ofstream out(path);
  if (!out) throw data_error("cannot write type mapping file: " + path);
  for (const auto& r : mapping.relations()) {
    auto [h, t] = mapping.types_of(r);
    out << r << '\t' << mapping.head_types()[h] << '\t' << mapping.tail_types()[t] << '\n';
  }
}

namespace detail {
inline Span parse_span(const nlohmann::json& j, const char* which, std::size_t token_count,
                       const std::string& where) {
  if (!j.contains("start") || !j.contains("end"))
    throw data_error(where + ": " + which + " span needs start and end");
  long start = j.at("start").get<long>();
  long end = j.at("end").get<long>();
  if (start < 0 || end < 0)
    throw data_error(where + ": " + which + " span is negative");
  if (start >= end)
    throw data_error(where + ": empty span for " + which);
  if (static_cast<std::size_t>(end) > token_count)
    throw data_error(where + ": " + which + " span exceeds token count");
  return Span{static_cast<std::size_t>(start), static_cast<std::size_t>(end)};
}
}  // namespace detail

// JSON-lines instance loader. Validates token counts, span bounds, span
// overlap, and (when a vocabulary is given) relation membership.
inline std::vector<Instance> load_instances(const std::string& path,
                                            const RelationVocab* relations = nullptr) {
  std::ifstream in(path);
  if (!in) throw data_error("cannot open instance file: " + path);
  std::vector<Instance> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::string where = path + ":" + std::to_string(line_no);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw data_error(where + ": invalid JSON: " + e.what());
    }
    Instance inst;
    try {
      inst.id = j.at("id").get<std::string>();
      inst.tokens = j.at("tokens").get<std::vector<std::string>>();
      inst.relation = j.at("relation").get<std::string>();
      inst.head = detail::parse_span(j.at("head"), "head", inst.tokens.size(), where);
      inst.tail = detail::parse_span(j.at("tail"), "tail", inst.tokens.size(), where);
    } catch (const nlohmann::json::exception& e) {
      throw data_error(where + ": missing or malformed field: " + e.what());
    }
    if (inst.tokens.empty()) throw data_error(where + ": instance has no tokens");
    bool overlap = inst.head.start < inst.tail.end && inst.tail.start < inst.head.end;
    if (overlap) throw data_error(where + ": head and tail spans overlap");
    inst.parse_ref = j.value("parse_ref", inst.id);
    if (j.contains("kept")) inst.kept = j.at("kept").get<std::vector<std::size_t>>();
    if (relations && !relations->contains(inst.relation))
      throw data_error(where + ": unknown relation '" + inst.relation + "'");
    out.push_back(std::move(inst));
  }
  return out;
}

inline nlohmann::json instance_to_json(const Instance& inst) {
  nlohmann::json j{{"id", inst.id},
                   {"tokens", inst.tokens},
                   {"head", {{"start", inst.head.start}, {"end", inst.head.end}}},
                   {"tail", {{"start", inst.tail.start}, {"end", inst.tail.end}}},
                   {"relation", inst.relation}};
  if (inst.parse_ref != inst.id) j["parse_ref"] = inst.parse_ref;
  if (!inst.kept.empty()) j["kept"] = inst.kept;
  return j;
}

inline void save_instances(const std::string& path, const std::vector<Instance>& instances) {
  std::ofstream out(path);
  if (!out) throw data_error("cannot write instance file: " + path);
  for (const auto& inst : instances) out << instance_to_json(inst).dump() << "\n";
}

// All instances sharing an entity pair (and, in training, a relation).
struct Bag {
  std::string head;
  std::string tail;
  std::string relation;                 // train mode; empty in test mode
  std::vector<std::size_t> members;     // indices into the source instance list
  std::set<std::string> gold;           // test mode: non-NA relations of members

  std::string key() const { return head + "\t" + tail + "\t" + relation; }
  std::string pair_key() const { return head + "\t" + tail; }
};

enum class BagMode { train, test };

// Groups instances into bags. Train mode keys on (head, tail, relation);
// test mode keys on (head, tail) and collects the gold fact set. Bags appear
// in first-occurrence order.
inline std::vector<Bag> group_bags(const std::vector<Instance>& instances, BagMode mode) {
  std::vector<Bag> bags;
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < instances.size(); ++i) {
    const Instance& inst = instances[i];
    std::string key = inst.head_surface() + "\t" + inst.tail_surface();
    if (mode == BagMode::train) key += "\t" + inst.relation;
    auto [it, inserted] = index.try_emplace(std::move(key), bags.size());
    if (inserted) {
      Bag bag;
      bag.head = inst.head_surface();
      bag.tail = inst.tail_surface();
      if (mode == BagMode::train) bag.relation = inst.relation;
      bags.push_back(std::move(bag));
    }
    Bag& bag = bags[it->second];
    bag.members.push_back(i);
    if (mode == BagMode::test && inst.relation != RelationVocab::kNA)
      bag.gold.insert(inst.relation);
  }
  return bags;
}

// Type labels of a training bag under the mapping.
inline std::pair<std::size_t, std::size_t> derive_type_labels(const Bag& bag,
                                                              const TypeMapping& mapping) {
  return mapping.types_of(bag.relation);
}

}  // namespace strex
