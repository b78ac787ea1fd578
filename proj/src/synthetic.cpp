#include "ahdd/synthetic.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>
#include <vector>

#include <json.hpp>

#include "ahdd/error.hpp"

namespace ahdd {

namespace {

std::string base26(int n, int width = 3) {
  std::string s(width, 'a');
  for (int i = width - 1; i >= 0; --i) {
    s[i] = static_cast<char>('a' + n % 26);
    n /= 26;
  }
  return s;
}

void validate(const SyntheticSpec& spec) {
  require(spec.num_codes >= 1, "synthetic: num_codes must be positive");
  require(spec.branching >= 1, "synthetic: branching must be positive");
  require(spec.train_docs >= 1 && spec.dev_docs >= 1 && spec.test_docs >= 1,
          "synthetic: split sizes must be positive");
  require(spec.note_length >= 1, "synthetic: note_length must be positive");
  require(spec.signal_fraction > 0.0 && spec.signal_fraction <= 1.0,
          "synthetic: signal_fraction must be in (0,1]");
  int parents = (spec.num_codes + spec.branching - 1) / spec.branching;
  int keywords = parents + spec.num_codes;
  require(keywords < spec.vocab_size,
          "synthetic: spec demands " + std::to_string(keywords) +
              " keywords but vocab_size is only " + std::to_string(spec.vocab_size));
  require(spec.vocab_size <= 17576, "synthetic: vocab_size capped at 26^3");
}

}  // namespace

std::string synthetic_stem_keyword(int parent_idx) { return "stem" + base26(parent_idx); }
std::string synthetic_disc_keyword(int leaf_idx) { return "disc" + base26(leaf_idx); }

SyntheticPaths generate_synthetic(const SyntheticSpec& spec, const std::string& out_dir) {
  validate(spec);
  std::filesystem::create_directories(out_dir);

  const int parents = (spec.num_codes + spec.branching - 1) / spec.branching;
  const int noise_words = spec.vocab_size - parents - spec.num_codes;

  // Depth-2 hierarchy: parent p -> codes "pNN.k". Descriptions mirror the
  // ICD pattern of a shared stem plus one discriminative term per child.
  struct Leaf {
    std::string code;
    int parent;
    int leaf_idx;
  };
  std::vector<std::string> parent_codes;
  std::vector<Leaf> leaves;
  for (int p = 0; p < parents; ++p) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "p%02d", p + 1);
    parent_codes.push_back(buf);
  }
  for (int c = 0; c < spec.num_codes; ++c) {
    int p = c / spec.branching;
    leaves.push_back({parent_codes[p] + "." + std::to_string(c % spec.branching + 1), p, c});
  }

  SyntheticPaths paths;
  paths.description_tsv = (std::filesystem::path(out_dir) / "codes.tsv").string();
  {
    std::ofstream tsv(paths.description_tsv);
    require(tsv.good(), "synthetic: cannot write '" + paths.description_tsv + "'");
    for (int p = 0; p < parents; ++p)
      tsv << parent_codes[p] << '\t' << synthetic_stem_keyword(p) << " disorders\n";
    for (const auto& leaf : leaves)
      tsv << leaf.code << '\t' << synthetic_stem_keyword(leaf.parent) << ' '
          << synthetic_disc_keyword(leaf.leaf_idx) << '\n';
  }

  std::mt19937_64 rng(spec.seed);
  const int n_sig = std::max<int>(
      1, static_cast<int>(std::llround(spec.signal_fraction * spec.note_length)));

  auto write_split = [&](const std::string& name, int count, const std::string& file) {
    std::ofstream out(file);
    require(out.good(), "synthetic: cannot write '" + file + "'");
    for (int i = 0; i < count; ++i) {
      // Gold codes: distinct parent groups, one child each, so sibling codes
      // never co-occur.
      int max_gold = std::min({3, parents, std::max(1, n_sig / 2)});
      int n_gold = 1 + static_cast<int>(rng() % static_cast<uint64_t>(max_gold));
      std::vector<int> parent_pool(parents);
      for (int p = 0; p < parents; ++p) parent_pool[p] = p;
      std::shuffle(parent_pool.begin(), parent_pool.end(), rng);
      std::vector<const Leaf*> gold;
      for (int g = 0; g < n_gold; ++g) {
        std::vector<const Leaf*> group;
        for (const auto& leaf : leaves)
          if (leaf.parent == parent_pool[g]) group.push_back(&leaf);
        gold.push_back(group[rng() % group.size()]);
      }

      // Signal tokens cycle disc/stem per gold code; discriminative keywords
      // come first so every gold code's keyword is planted.
      std::vector<std::string> signal;
      for (int s = 0; static_cast<int>(signal.size()) < n_sig; ++s) {
        const Leaf* leaf = gold[s % n_gold];
        signal.push_back(s / n_gold % 2 == 0 ? synthetic_disc_keyword(leaf->leaf_idx)
                                             : synthetic_stem_keyword(leaf->parent));
      }

      std::vector<std::string> tokens(spec.note_length);
      for (int t = 0; t < spec.note_length; ++t)
        tokens[t] = "noise" + base26(static_cast<int>(rng() % noise_words));
      std::vector<int> pos(spec.note_length);
      for (int t = 0; t < spec.note_length; ++t) pos[t] = t;
      std::shuffle(pos.begin(), pos.end(), rng);
      for (int s = 0; s < n_sig; ++s) tokens[pos[s]] = signal[s];

      std::string text;
      for (int t = 0; t < spec.note_length; ++t) {
        if (t) text += ' ';
        text += tokens[t];
      }
      std::vector<std::string> labels;
      for (const auto* leaf : gold) labels.push_back(leaf->code);
      std::sort(labels.begin(), labels.end());

      nlohmann::json rec;
      char id[32];
      std::snprintf(id, sizeof(id), "%s-%05d", name.c_str(), i);
      rec["doc_id"] = id;
      rec["text"] = text;
      rec["labels"] = labels;
      out << rec.dump() << '\n';
    }
  };

  paths.train_jsonl = (std::filesystem::path(out_dir) / "train.jsonl").string();
  paths.dev_jsonl = (std::filesystem::path(out_dir) / "dev.jsonl").string();
  paths.test_jsonl = (std::filesystem::path(out_dir) / "test.jsonl").string();
  write_split("train", spec.train_docs, paths.train_jsonl);
  write_split("dev", spec.dev_docs, paths.dev_jsonl);
  write_split("test", spec.test_docs, paths.test_jsonl);
  return paths;
}

}  // namespace ahdd
