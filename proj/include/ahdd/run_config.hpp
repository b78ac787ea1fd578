#pragma once

#include <map>
#include <string>

#include "ahdd/trainer.hpp"

namespace ahdd {

// Key = value configuration shared by the CLI commands. Files use one
// `key = value` per line with `#` comments; unknown keys are rejected.
// AHDD_SEED in the environment overrides the configured seed; explicit
// command-line flags override everything.
struct RunConfig {
  std::string corpus_dir;        // holds train/dev/test.jsonl
  std::string descriptions;      // code<TAB>description TSV
  std::string parents;           // optional code<TAB>parent TSV
  std::string checkpoint;        // model file
  std::string output_dir = ".";
  std::string embeddings_file;   // optional pre-trained embeddings
  int min_count = 1;
  TrainingConfig training;

  void apply(const std::string& key, const std::string& value);
  static RunConfig from_file(const std::string& path);
  void apply_env();
};

}  // namespace ahdd
