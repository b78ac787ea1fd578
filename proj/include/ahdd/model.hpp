#pragma once

#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ahdd/attention.hpp"
#include "ahdd/corpus.hpp"
#include "ahdd/distill.hpp"
#include "ahdd/encoder.hpp"
#include "ahdd/hierarchy.hpp"
#include "ahdd/output_head.hpp"

namespace ahdd {

struct ModelConfig {
  int emb_dim = 100;
  int hidden_dim = 64;
  EncoderKind encoder = EncoderKind::kLinear;
  int conv_kernel_width = 3;
  bool desc_aware_attention = true;  // false: learned label queries U
  bool desc_aware_output = true;     // false: plain classification head
  uint64_t seed = 42;
};

// Per-forward switches; the structural ablations live in ModelConfig.
struct ForwardOptions {
  double lambda_sim = 0.1;
  double lambda_dis = 0.1;
  bool assoc_distill = true;    // ADD: associated-description loss terms
  bool sibling_distill = true;  // HDD: sibling-description loss term
};

// The four loss components of one training forward and their weighted total.
struct LossBundle {
  double bce_doc = 0.0;
  double bce_assoc = 0.0;
  double l_sim = 0.0;
  double l_dis = 0.0;
  double total = 0.0;
};

// Call counters proving the inference path stays description-free.
struct PathCounters {
  long distill_pair_builds = 0;
  long desc_doc_encodings = 0;  // associated / sibling pseudo-document encodings
  long code_matrix_builds = 0;  // one-time H_C construction
};

// The full network: shared encoder, code-description-aware attention,
// distillation losses, and the description-aware head. One encoder instance
// serves the note, the description documents, and the per-code descriptions.
class Model {
 public:
  Model(const ModelConfig& config, const CodeHierarchy& hierarchy, const Vocabulary& vocab);

  struct Forward {
    std::vector<double> probabilities;
    LossBundle losses;
    VarId total = -1;          // backward target
    VarId attention = -1;      // N_L x N_d weights over the note
  };

  // Builds the full training graph for one document on the supplied tape.
  Forward forward(Tape& tape, const Document& doc, const ForwardOptions& opts) const;

  // Inference: frozen parameters, cached code matrix, no distillation.
  void refresh_inference_cache();
  std::vector<double> predict_probabilities(const Document& doc) const;
  std::pair<std::vector<double>, std::set<std::string>> predict(const Document& doc,
                                                                double threshold) const;
  // Attention row of one code over a document (inference path).
  std::vector<double> attention_row(const Document& doc, const std::string& code) const;

  ParamStore& params() { return store_; }
  const ParamStore& params() const { return store_; }
  const ModelConfig& config() const { return config_; }
  const CodeHierarchy& hierarchy() const { return hierarchy_; }
  const Vocabulary& vocab() const { return vocab_; }
  const Encoder& encoder() const { return *encoder_; }
  int num_labels() const { return hierarchy_.num_labels(); }

  const PathCounters& counters() const { return counters_; }
  void reset_counters() const { counters_ = PathCounters{}; }

 private:
  VarId attention_queries(Tape& tape, VarId code_matrix) const;
  VarId score_vector(Tape& tape, VarId label_repr, VarId code_matrix) const;
  struct LabelReprOut {
    VarId repr;
    VarId weights;
  };
  LabelReprOut label_repr_for(Tape& tape, VarId queries, std::span<const int> tokens) const;

  ModelConfig config_;
  CodeHierarchy hierarchy_;
  Vocabulary vocab_;
  ParamStore store_;
  ParamId embeddings_ = -1;
  std::unique_ptr<Encoder> encoder_;
  ParamId query_proj_ = -1;     // W_Q, description-aware attention
  ParamId label_queries_ = -1;  // U, plain attention
  ParamId class_weights_ = -1;  // W
  ParamId desc_proj_ = -1;      // W_l, description-aware head
  std::vector<std::vector<int>> desc_ids_;  // per label, id-mapped description

  struct InferenceCache {
    Matrix code_matrix;  // H_C
    Matrix queries;      // H_C W_Q or U
    Matrix projected;    // H_C W_l (description-aware head only)
  };
  mutable std::optional<InferenceCache> cache_;
  mutable PathCounters counters_;
};

}  // namespace ahdd
