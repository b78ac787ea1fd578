#pragma once

#include <memory>
#include <string>

#include "ahdd/model.hpp"
#include "ahdd/trainer.hpp"

namespace ahdd {

// Versioned container: magic "AHDD1", a JSON header (config echo, vocabulary,
// hierarchy digest, parameter manifest), then raw little-endian doubles per
// parameter in declared order. Loading rejects digest mismatches.
void save_checkpoint(const std::string& path, const Model& model, const TrainingConfig& config);

struct LoadedCheckpoint {
  std::unique_ptr<Model> model;
  TrainingConfig config;
};

LoadedCheckpoint load_checkpoint(const std::string& path, const CodeHierarchy& hierarchy);

}  // namespace ahdd
