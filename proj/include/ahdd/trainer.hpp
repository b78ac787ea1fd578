#pragma once

#include <string>
#include <vector>

#include "ahdd/model.hpp"

namespace ahdd {

struct TrainingConfig {
  double lambda_sim = 0.1;
  double lambda_dis = 0.1;
  double learning_rate = 1e-3;
  int epochs = 30;
  int batch_size = 16;
  uint64_t seed = 42;
  EncoderKind encoder = EncoderKind::kLinear;
  bool no_assoc_distill = false;    // w/o ADD
  bool no_sibling_distill = false;  // w/o HDD
  bool no_desc_attention = false;   // w/o D-att: learned label queries
  bool no_desc_output = false;      // w/o D-output: plain head
  double threshold = 0.5;
  int emb_dim = 100;
  int hidden_dim = 64;
  int conv_kernel_width = 3;
  int max_length = 2500;

  void validate() const;
  ModelConfig model_config() const;
  ForwardOptions forward_options() const;
};

// -sum_i [ y_i log p_i + (1-y_i) log(1-p_i) ], probabilities clamped to
// [1e-7, 1-1e-7] before the logs.
double bce(const std::vector<double>& probs, const std::vector<char>& targets);

struct EpochLog {
  int epoch = 0;
  double bce_doc = 0.0;
  double bce_assoc = 0.0;
  double l_sim = 0.0;
  double l_dis = 0.0;
  double total = 0.0;
  double dev_micro_f1 = 0.0;
};

struct TrainResult {
  std::vector<EpochLog> epochs;
  int best_epoch = 0;
  double best_dev_micro_f1 = 0.0;
};

// Mini-batch Adam over per-document forwards with gradient accumulation.
// Deterministic given config.seed; the model is left at the parameters of
// the best dev-micro-F1 epoch.
TrainResult train(Model& model, const std::vector<Document>& train_docs,
                  const std::vector<Document>& dev_docs, const TrainingConfig& config);

// Evaluation-split micro F1 at the decision threshold, via the inference path.
double micro_f1_on(const Model& model, const std::vector<Document>& docs, double threshold);

std::string loss_log_tsv(const std::vector<EpochLog>& logs);

}  // namespace ahdd
