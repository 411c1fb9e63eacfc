#pragma once

#include <filesystem>
#include <string>

#include "c2f/eval.hpp"
#include "c2f/inference.hpp"
#include "c2f/synthdata/generator.hpp"
#include "c2f/trainer.hpp"

namespace c2f {

struct EvalOptions {
  eval::Protocol protocol = eval::Protocol::kAllOccurrence;
  bool score_curves = false;  // write per-video F/CS/AS CSVs next to the report
};

// Everything one pipeline run needs. The JSON form has the sections corpus,
// model, loss, train, inference and eval; model and loss land in train.
// feature_dim and num_classes live in corpus and are copied into the model.
struct RunConfig {
  synthdata::CorpusConfig corpus;
  trainer::TrainConfig train;
  inference::InferenceConfig inference;
  EvalOptions eval;

  // Copies shared fields (dims, head layout) into the model config.
  void sync();
  void validate() const;

  // Sets both the corpus and the training seed.
  void set_seed(std::uint64_t seed);
};

// Desk-scale defaults.
RunConfig default_run_config();

// Applies a JSON document over the defaults. Unknown sections or keys and
// mistyped values throw ConfigError.
RunConfig parse_run_config(const std::string& text);
RunConfig load_run_config(const std::filesystem::path& path);

// Fully resolved document, every key present.
std::string run_config_to_json(const RunConfig& config);

// One line per key: section.key, default, description.
std::string run_config_help();

}  // namespace c2f
