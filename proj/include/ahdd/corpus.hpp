#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "ahdd/hierarchy.hpp"

namespace ahdd {

// Lowercase, split on non-alphanumeric boundaries, drop tokens that contain
// no alphabetic character ("27.8" -> nothing, "x27" kept).
std::vector<std::string> tokenize(const std::string& text);

// Token ids: 0 = padding, 1 = unknown, >= 2 real tokens in descending corpus
// frequency (ties lexicographic).
class Vocabulary {
 public:
  static constexpr int kPad = 0;
  static constexpr int kUnk = 1;

  Vocabulary() = default;
  explicit Vocabulary(std::vector<std::string> tokens_by_id);  // ids 2..N

  int id_of(const std::string& token) const;  // kUnk when absent
  bool contains(const std::string& token) const { return ids_.count(token) != 0; }
  const std::string& token_of(int id) const;  // pad/unk give markers
  int size() const { return static_cast<int>(tokens_.size()) + 2; }

  std::vector<int> encode(const std::vector<std::string>& tokens) const;
  const std::vector<std::string>& tokens() const { return tokens_; }

 private:
  std::vector<std::string> tokens_;          // index = id - 2
  std::map<std::string, int> ids_;
};

// Raw (string-token) document, the unit build_vocab consumes.
struct RawDocument {
  std::string doc_id;
  std::vector<std::string> tokens;
  std::vector<std::string> labels;
};

// Id-mapped document with its gold code set.
struct Document {
  std::string doc_id;
  std::vector<int> tokens;               // length N_d >= 1, post-truncation
  std::set<std::string> labels;          // all present in the hierarchy
  std::vector<char> label_vector(const CodeHierarchy& h) const;
};

// Tokens with corpus frequency >= min_count get ids; hierarchy description
// tokens are always included regardless of count.
Vocabulary build_vocab(const std::vector<RawDocument>& docs, const CodeHierarchy& hierarchy,
                       int min_count);

// One record per line: {"doc_id": str, "text": str, "labels": [str]}.
std::vector<Document> load_jsonl(const std::string& path, const Vocabulary& vocab,
                                 const CodeHierarchy& hierarchy, int max_length);
std::vector<RawDocument> load_jsonl_raw(const std::string& path);

// Inverse of load_jsonl for in-vocabulary documents.
std::string to_jsonl_line(const Document& doc, const Vocabulary& vocab);

}  // namespace ahdd
