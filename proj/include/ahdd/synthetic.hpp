#pragma once

#include <cstdint>
#include <string>

namespace ahdd {

// Knobs for the planted-keyword corpus. Each leaf code owns one
// discriminative keyword; each parent group shares one stem keyword that
// appears in all of its children's descriptions. Around 10% of tokens in a
// generated note are signal by default, the rest uniform noise.
struct SyntheticSpec {
  int num_codes = 20;        // leaf codes (each carries a discriminative keyword)
  int branching = 3;         // leaf codes per parent group
  int train_docs = 500;
  int dev_docs = 100;
  int test_docs = 100;
  int note_length = 100;
  double signal_fraction = 0.1;
  int vocab_size = 200;      // total keyword + noise token universe
  uint64_t seed = 42;
};

struct SyntheticPaths {
  std::string train_jsonl;
  std::string dev_jsonl;
  std::string test_jsonl;
  std::string description_tsv;
};

// Deterministic given spec.seed: same spec -> byte-identical files. Gold sets
// hold 1-3 leaf codes, never two siblings of the same parent together.
SyntheticPaths generate_synthetic(const SyntheticSpec& spec, const std::string& out_dir);

// Keyword naming scheme, exposed so tests and the attention-visualization
// check can locate a code's planted keyword.
std::string synthetic_stem_keyword(int parent_idx);
std::string synthetic_disc_keyword(int leaf_idx);

}  // namespace ahdd
