#pragma once

#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "strex/common.hpp"

namespace strex {

enum class PruneMode { stp, sdp, none };
enum class EvalSetting { one, two, all };
enum class BatchUnit { bags, sentences };

inline PruneMode prune_mode_from(const std::string& s) {
  if (s == "stp") return PruneMode::stp;
  if (s == "sdp") return PruneMode::sdp;
  if (s == "none") return PruneMode::none;
  throw data_error("unknown pruning mode '" + s + "' (expected stp, sdp or none)");
}
inline const char* to_string(PruneMode m) {
  switch (m) {
    case PruneMode::stp: return "stp";
    case PruneMode::sdp: return "sdp";
    case PruneMode::none: return "none";
  }
  return "?";
}

inline EvalSetting eval_setting_from(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (s == "one") return EvalSetting::one;
  if (s == "two") return EvalSetting::two;
  if (s == "all") return EvalSetting::all;
  throw data_error("unknown eval setting '" + s + "' (expected one, two or all)");
}
inline const char* to_string(EvalSetting s) {
  switch (s) {
    case EvalSetting::one: return "one";
    case EvalSetting::two: return "two";
    case EvalSetting::all: return "all";
  }
  return "?";
}

// Training hyperparameters. Defaults follow the grid-searched settings the
// extractor ships with; desk-scale runs usually shrink the model dimensions.
struct TrainConfig {
  double learning_rate = 0.001;
  std::size_t batch_size = 50;
  double dropout_prob = 0.5;
  double l2_beta = 0.0001;
  double task_weight_head = 0.5;   // entity-task weight, head side
  double task_weight_tail = 0.5;   // entity-task weight, tail side
  double joint_entity_weight = 0.3;  // weight of the entity objective in joint mode
  std::size_t gru_size = 230;
  std::size_t word_dim = 50;
  std::size_t pos_dim = 5;
  int clip_distance = 30;
  std::size_t epochs = 20;
  std::size_t pretrain_epochs = 10;
  std::uint64_t seed = 1;

  BatchUnit batch_unit = BatchUnit::bags;
  double na_ratio = 1.0;           // NA bags sampled per non-NA bag each epoch
  double val_fraction = 0.1;       // held-out split used to pick the best pretrain state
  bool freeze_embeddings = false;
  bool per_relation_query = false;  // relation-specific sentence-attention queries

  void validate() const {
    if (!(dropout_prob > 0.0 && dropout_prob < 1.0))
      throw data_error("dropout probability must be in (0,1)");
    if (l2_beta < 0.0) throw data_error("l2 coefficient must be >= 0");
    if (!(joint_entity_weight > 0.0 && joint_entity_weight < 1.0))
      throw data_error("joint entity weight must be in (0,1)");
    if (batch_size == 0) throw data_error("batch size must be positive");
    if (gru_size == 0 || word_dim == 0 || pos_dim == 0)
      throw data_error("model dimensions must be positive");
    if (clip_distance <= 0) throw data_error("clip distance must be positive");
    if (na_ratio < 0.0) throw data_error("NA sampling ratio must be >= 0");
    if (val_fraction < 0.0 || val_fraction >= 1.0)
      throw data_error("validation fraction must be in [0,1)");
  }
};

// Synthetic corpus generation knobs.
struct SyntheticConfig {
  std::uint64_t seed = 1;
  std::size_t n_bags = 200;        // training bags
  std::size_t n_relations = 5;     // including NA
  std::size_t vocab_size = 100;    // noise word pool
  std::size_t test_bags = 0;
  std::size_t min_instances = 1;
  std::size_t max_instances = 3;
  std::size_t min_noise = 1;       // noise tokens before the relational phrase
  std::size_t max_noise = 4;
  double distractor_prob = 0.3;    // noise token is another relation's keyword
};

// One configuration file drives every subcommand; flags override fields.
struct RunConfig {
  // Input and output paths; empty string means "not set".
  std::string instances_path;
  std::string parses_path;
  std::string test_instances_path;
  std::string test_parses_path;
  std::string embeddings_path;
  std::string type_mapping_path;
  std::string checkpoint_path;
  std::string out_dir = ".";

  TrainConfig train;
  SyntheticConfig synth;
  PruneMode prune_mode = PruneMode::stp;
  EvalSetting eval_setting = EvalSetting::all;
  std::vector<std::size_t> p_at_n = {100, 200, 300};
};

namespace detail {
template <typename T>
void maybe(const nlohmann::json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}
}  // namespace detail

inline RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw data_error("cannot open config file: " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw data_error(path + ": invalid JSON: " + e.what());
  }
  RunConfig cfg;
  if (j.contains("paths")) {
    const auto& p = j.at("paths");
    detail::maybe(p, "instances", cfg.instances_path);
    detail::maybe(p, "parses", cfg.parses_path);
    detail::maybe(p, "test_instances", cfg.test_instances_path);
    detail::maybe(p, "test_parses", cfg.test_parses_path);
    detail::maybe(p, "embeddings", cfg.embeddings_path);
    detail::maybe(p, "type_mapping", cfg.type_mapping_path);
    detail::maybe(p, "checkpoint", cfg.checkpoint_path);
    detail::maybe(p, "out", cfg.out_dir);
  }
  if (j.contains("train")) {
    const auto& t = j.at("train");
    detail::maybe(t, "learning_rate", cfg.train.learning_rate);
    detail::maybe(t, "batch_size", cfg.train.batch_size);
    detail::maybe(t, "dropout", cfg.train.dropout_prob);
    detail::maybe(t, "l2_beta", cfg.train.l2_beta);
    detail::maybe(t, "task_weight_head", cfg.train.task_weight_head);
    detail::maybe(t, "task_weight_tail", cfg.train.task_weight_tail);
    detail::maybe(t, "joint_entity_weight", cfg.train.joint_entity_weight);
    detail::maybe(t, "gru_size", cfg.train.gru_size);
    detail::maybe(t, "word_dim", cfg.train.word_dim);
    detail::maybe(t, "pos_dim", cfg.train.pos_dim);
    detail::maybe(t, "clip_distance", cfg.train.clip_distance);
    detail::maybe(t, "epochs", cfg.train.epochs);
    detail::maybe(t, "pretrain_epochs", cfg.train.pretrain_epochs);
    detail::maybe(t, "seed", cfg.train.seed);
    detail::maybe(t, "na_ratio", cfg.train.na_ratio);
    detail::maybe(t, "val_fraction", cfg.train.val_fraction);
    detail::maybe(t, "freeze_embeddings", cfg.train.freeze_embeddings);
    detail::maybe(t, "per_relation_query", cfg.train.per_relation_query);
    if (t.contains("batch_unit")) {
      std::string u = t.at("batch_unit").get<std::string>();
      if (u == "bags") cfg.train.batch_unit = BatchUnit::bags;
      else if (u == "sentences") cfg.train.batch_unit = BatchUnit::sentences;
      else throw data_error("unknown batch unit '" + u + "'");
    }
  }
  if (j.contains("synthetic")) {
    const auto& s = j.at("synthetic");
    detail::maybe(s, "seed", cfg.synth.seed);
    detail::maybe(s, "n_bags", cfg.synth.n_bags);
    detail::maybe(s, "n_relations", cfg.synth.n_relations);
    detail::maybe(s, "vocab_size", cfg.synth.vocab_size);
    detail::maybe(s, "test_bags", cfg.synth.test_bags);
    detail::maybe(s, "min_instances", cfg.synth.min_instances);
    detail::maybe(s, "max_instances", cfg.synth.max_instances);
    detail::maybe(s, "min_noise", cfg.synth.min_noise);
    detail::maybe(s, "max_noise", cfg.synth.max_noise);
    detail::maybe(s, "distractor_prob", cfg.synth.distractor_prob);
  }
  if (j.contains("prune_mode")) cfg.prune_mode = prune_mode_from(j.at("prune_mode").get<std::string>());
  if (j.contains("eval_setting"))
    cfg.eval_setting = eval_setting_from(j.at("eval_setting").get<std::string>());
  detail::maybe(j, "p_at_n", cfg.p_at_n);
  cfg.train.validate();
  return cfg;
}

}  // namespace strex
