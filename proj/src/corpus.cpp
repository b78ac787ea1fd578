#include "ahdd/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace ahdd {

std::vector<std::string> tokenize(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  bool has_alpha = false;
  auto flush = [&] {
    if (!cur.empty() && has_alpha) out.push_back(cur);
    cur.clear();
    has_alpha = false;
  };
  for (unsigned char ch : text) {
    if (std::isalnum(ch)) {
      if (std::isalpha(ch)) has_alpha = true;
      cur.push_back(static_cast<char>(std::tolower(ch)));
    } else {
      flush();
    }
  }
  flush();
  return out;
}

Vocabulary::Vocabulary(std::vector<std::string> tokens_by_id) : tokens_(std::move(tokens_by_id)) {
  for (int i = 0; i < static_cast<int>(tokens_.size()); ++i) {
    require(ids_.emplace(tokens_[i], i + 2).second,
            "vocabulary: duplicate token '" + tokens_[i] + "'");
  }
}

int Vocabulary::id_of(const std::string& token) const {
  auto it = ids_.find(token);
  return it == ids_.end() ? kUnk : it->second;
}

const std::string& Vocabulary::token_of(int id) const {
  static const std::string kPadTok = "<pad>";
  static const std::string kUnkTok = "<unk>";
  if (id == kPad) return kPadTok;
  if (id == kUnk) return kUnkTok;
  require(id >= 2 && id < size(), "vocabulary: id out of range");
  return tokens_[id - 2];
}

std::vector<int> Vocabulary::encode(const std::vector<std::string>& tokens) const {
  std::vector<int> ids;
  ids.reserve(tokens.size());
  for (const auto& t : tokens) ids.push_back(id_of(t));
  return ids;
}

std::vector<char> Document::label_vector(const CodeHierarchy& h) const {
  std::vector<char> y(h.num_labels(), 0);
  for (const auto& code : labels) y[h.label_index(code)] = 1;
  return y;
}

Vocabulary build_vocab(const std::vector<RawDocument>& docs, const CodeHierarchy& hierarchy,
                       int min_count) {
  require(min_count >= 1, "build_vocab: min_count must be >= 1");
  require(!docs.empty(), "build_vocab: empty corpus");
  std::map<std::string, long> counts;
  for (const auto& d : docs)
    for (const auto& t : d.tokens) ++counts[t];
  std::set<std::string> desc_tokens;
  for (const auto& code : hierarchy.codes())
    for (const auto& t : hierarchy.node(code).description) desc_tokens.insert(t);

  std::vector<std::pair<long, std::string>> kept;
  for (const auto& [tok, n] : counts)
    if (n >= min_count || desc_tokens.count(tok)) kept.emplace_back(n, tok);
  for (const auto& tok : desc_tokens)
    if (!counts.count(tok)) kept.emplace_back(0, tok);

  std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  std::vector<std::string> tokens;
  tokens.reserve(kept.size());
  for (auto& [n, tok] : kept) tokens.push_back(std::move(tok));
  return Vocabulary(std::move(tokens));
}

std::vector<RawDocument> load_jsonl_raw(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), "cannot open corpus file '" + path + "'");
  std::vector<RawDocument> docs;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    nlohmann::json rec = nlohmann::json::parse(line, nullptr, false);
    require(!rec.is_discarded() && rec.is_object(),
            path + ":" + std::to_string(lineno) + ": malformed JSON record");
    require(rec.contains("doc_id") && rec.contains("text") && rec.contains("labels"),
            path + ":" + std::to_string(lineno) + ": record needs doc_id, text, labels");
    RawDocument d;
    d.doc_id = rec["doc_id"].get<std::string>();
    d.tokens = tokenize(rec["text"].get<std::string>());
    for (const auto& l : rec["labels"]) d.labels.push_back(l.get<std::string>());
    docs.push_back(std::move(d));
  }
  return docs;
}

std::vector<Document> load_jsonl(const std::string& path, const Vocabulary& vocab,
                                 const CodeHierarchy& hierarchy, int max_length) {
  require(max_length >= 1, "load_jsonl: max_length must be >= 1");
  std::vector<Document> docs;
  for (auto& raw : load_jsonl_raw(path)) {
    Document d;
    d.doc_id = raw.doc_id;
    if (static_cast<int>(raw.tokens.size()) > max_length) raw.tokens.resize(max_length);
    d.tokens = vocab.encode(raw.tokens);
    require(!d.tokens.empty(), path + ": document '" + d.doc_id + "' has no tokens");
    for (const auto& code : raw.labels) {
      require(hierarchy.contains(code),
              path + ": document '" + d.doc_id + "' carries unknown label code '" + code + "'");
      d.labels.insert(code);
    }
    docs.push_back(std::move(d));
  }
  return docs;
}

std::string to_jsonl_line(const Document& doc, const Vocabulary& vocab) {
  std::string text;
  for (size_t i = 0; i < doc.tokens.size(); ++i) {
    if (i) text += ' ';
    text += vocab.token_of(doc.tokens[i]);
  }
  nlohmann::json rec;
  rec["doc_id"] = doc.doc_id;
  rec["text"] = text;
  rec["labels"] = std::vector<std::string>(doc.labels.begin(), doc.labels.end());
  return rec.dump();
}

}  // namespace ahdd
