#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ahdd/error.hpp"

namespace ahdd {

// One ICD code: identifier, tokenized short description, optional parent.
struct IcdCode {
  std::string code;
  std::vector<std::string> description;  // >= 1 token
  std::optional<std::string> parent;
};

enum class ParentMode { kDotTruncation, kExplicit };

// Strips the final dot-separated segment: "285.1" -> "285". Codes without a
// dot have no derivable parent. Explicit mode reads the supplied table.
std::optional<std::string> derive_parent(
    const std::string& code, ParentMode mode,
    const std::map<std::string, std::string>* parent_table = nullptr);

// The ICD label space. Immutable after load; label_index assigns every code
// an integer in [0, N_L) by sorted code order.
class CodeHierarchy {
 public:
  CodeHierarchy() = default;

  // Builds from already-tokenized codes. Parents that do not name a loaded
  // code are dropped (the code becomes a root).
  static CodeHierarchy build(std::vector<IcdCode> codes);

  int num_labels() const { return static_cast<int>(order_.size()); }
  bool contains(const std::string& code) const { return index_.count(code) != 0; }

  const IcdCode& node(const std::string& code) const;
  int label_index(const std::string& code) const;
  const std::string& code_at(int index) const;
  const std::vector<std::string>& codes() const { return order_; }

  // Ordered children (by code) of a code; empty when leaf.
  const std::vector<std::string>& children(const std::string& code) const;

  // All codes sharing `code`'s parent, excluding `code` itself. Roots and
  // only children get the empty set.
  std::set<std::string> siblings_of(const std::string& code) const;

  // FNV-1a over the canonical serialization; checkpoints store this to catch
  // evaluation against a different label space.
  uint64_t digest() const;

 private:
  std::vector<IcdCode> nodes_;               // label_index order
  std::vector<std::string> order_;           // sorted codes
  std::map<std::string, int> index_;         // code -> label_index
  std::map<std::string, std::vector<std::string>> children_;
  std::vector<std::string> empty_children_;
};

// Loads `code<TAB>description` lines, tokenizes descriptions with the corpus
// tokenizer, and derives parents (explicit table wins over dot truncation).
CodeHierarchy load_hierarchy(const std::string& desc_path,
                             const std::optional<std::string>& parent_path = std::nullopt);

}  // namespace ahdd
