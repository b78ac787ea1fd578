#include "ahdd/hierarchy.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "ahdd/corpus.hpp"

namespace ahdd {

std::optional<std::string> derive_parent(const std::string& code, ParentMode mode,
                                         const std::map<std::string, std::string>* parent_table) {
  require(!code.empty(), "derive_parent: empty code");
  if (mode == ParentMode::kExplicit) {
    require(parent_table != nullptr, "derive_parent: explicit mode needs a loaded parent table");
    auto it = parent_table->find(code);
    if (it == parent_table->end()) return std::nullopt;
    return it->second;
  }
  auto pos = code.rfind('.');
  if (pos == std::string::npos) return std::nullopt;
  return code.substr(0, pos);
}

CodeHierarchy CodeHierarchy::build(std::vector<IcdCode> codes) {
  CodeHierarchy h;
  std::map<std::string, IcdCode> by_code;
  for (auto& c : codes) {
    require(!c.code.empty(), "hierarchy: empty code identifier");
    require(!c.description.empty(), "hierarchy: code '" + c.code + "' has an empty description");
    require(!c.parent || *c.parent != c.code, "hierarchy: code '" + c.code + "' is its own parent");
    require(!by_code.count(c.code), "hierarchy: duplicate code '" + c.code + "'");
    std::string key = c.code;
    by_code.emplace(std::move(key), std::move(c));
  }
  // Parents outside the loaded code set are not authoritative; such codes
  // behave as roots.
  for (auto& [code, node] : by_code) {
    if (node.parent && !by_code.count(*node.parent)) node.parent.reset();
  }
  // Cycle check over the in-set parent chains.
  for (const auto& [code, node] : by_code) {
    std::set<std::string> seen{code};
    const IcdCode* cur = &node;
    while (cur->parent) {
      if (!seen.insert(*cur->parent).second)
        fail("hierarchy: parent cycle involving code '" + *cur->parent + "'");
      cur = &by_code.at(*cur->parent);
    }
  }
  for (auto& [code, node] : by_code) {
    h.order_.push_back(code);
    if (node.parent) h.children_[*node.parent].push_back(code);
  }
  std::sort(h.order_.begin(), h.order_.end());
  for (auto& [parent, kids] : h.children_) std::sort(kids.begin(), kids.end());
  for (int i = 0; i < static_cast<int>(h.order_.size()); ++i) {
    h.index_[h.order_[i]] = i;
    h.nodes_.push_back(std::move(by_code.at(h.order_[i])));
  }
  return h;
}

const IcdCode& CodeHierarchy::node(const std::string& code) const {
  auto it = index_.find(code);
  require(it != index_.end(), "hierarchy: unknown code '" + code + "'");
  return nodes_[it->second];
}

int CodeHierarchy::label_index(const std::string& code) const {
  auto it = index_.find(code);
  require(it != index_.end(), "hierarchy: unknown code '" + code + "'");
  return it->second;
}

const std::string& CodeHierarchy::code_at(int index) const {
  require(index >= 0 && index < num_labels(), "hierarchy: label index out of range");
  return order_[index];
}

const std::vector<std::string>& CodeHierarchy::children(const std::string& code) const {
  require(contains(code), "hierarchy: unknown code '" + code + "'");
  auto it = children_.find(code);
  return it == children_.end() ? empty_children_ : it->second;
}

std::set<std::string> CodeHierarchy::siblings_of(const std::string& code) const {
  const IcdCode& n = node(code);
  std::set<std::string> sibs;
  if (!n.parent) return sibs;
  for (const auto& kid : children(*n.parent))
    if (kid != code) sibs.insert(kid);
  return sibs;
}

uint64_t CodeHierarchy::digest() const {
  uint64_t hash = 1469598103934665603ULL;
  auto mix = [&hash](const std::string& s) {
    for (unsigned char ch : s) {
      hash ^= ch;
      hash *= 1099511628211ULL;
    }
    hash ^= 0x1f;
    hash *= 1099511628211ULL;
  };
  for (const auto& n : nodes_) {
    mix(n.code);
    for (const auto& t : n.description) mix(t);
    mix(n.parent ? *n.parent : std::string("-"));
  }
  return hash;
}

namespace {

std::map<std::string, std::string> load_parent_table(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), "cannot open parent file '" + path + "'");
  std::map<std::string, std::string> table;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto tab = line.find('\t');
    require(tab != std::string::npos,
            path + ":" + std::to_string(lineno) + ": expected code<TAB>parent");
    std::string code = line.substr(0, tab);
    std::string parent = line.substr(tab + 1);
    require(!code.empty() && !parent.empty(),
            path + ":" + std::to_string(lineno) + ": empty code or parent");
    require(table.emplace(code, parent).second,
            path + ":" + std::to_string(lineno) + ": duplicate code '" + code + "'");
  }
  return table;
}

}  // namespace

CodeHierarchy load_hierarchy(const std::string& desc_path,
                             const std::optional<std::string>& parent_path) {
  std::ifstream in(desc_path);
  require(in.good(), "cannot open description file '" + desc_path + "'");

  std::map<std::string, std::string> parent_table;
  if (parent_path) parent_table = load_parent_table(*parent_path);

  std::vector<IcdCode> codes;
  std::set<std::string> seen;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto tab = line.find('\t');
    require(tab != std::string::npos,
            desc_path + ":" + std::to_string(lineno) + ": expected code<TAB>description");
    IcdCode node;
    node.code = line.substr(0, tab);
    require(!node.code.empty(), desc_path + ":" + std::to_string(lineno) + ": empty code");
    require(seen.insert(node.code).second,
            desc_path + ":" + std::to_string(lineno) + ": duplicate code '" + node.code + "'");
    node.description = tokenize(line.substr(tab + 1));
    require(!node.description.empty(),
            desc_path + ":" + std::to_string(lineno) + ": empty description for '" + node.code + "'");
    if (parent_path) {
      node.parent = derive_parent(node.code, ParentMode::kExplicit, &parent_table);
    } else {
      node.parent = derive_parent(node.code, ParentMode::kDotTruncation);
    }
    codes.push_back(std::move(node));
  }
  require(!codes.empty(), desc_path + ": no codes loaded");
  return CodeHierarchy::build(std::move(codes));
}

}  // namespace ahdd
