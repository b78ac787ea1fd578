#include "ahdd/distill.hpp"

#include <algorithm>

namespace ahdd {

DistillationPair build_distillation_pair(const std::set<std::string>& labels,
                                         const CodeHierarchy& hierarchy,
                                         const Vocabulary& vocab) {
  require(!labels.empty(), "build_distillation_pair: empty label set");
  DistillationPair pair;
  for (const auto& code : labels) {
    require(hierarchy.contains(code), "build_distillation_pair: unknown label '" + code + "'");
    pair.assoc_codes.insert(code);
    for (const auto& sib : hierarchy.siblings_of(code)) pair.sibling_codes.insert(sib);
  }
  for (const auto& code : labels) pair.sibling_codes.erase(code);

  // label_index order = sorted code order, so iterating the ordered sets
  // already concatenates descriptions in label_index order.
  auto concat = [&](const std::set<std::string>& codes) {
    std::vector<int> doc;
    for (const auto& code : codes) {
      auto ids = vocab.encode(hierarchy.node(code).description);
      doc.insert(doc.end(), ids.begin(), ids.end());
    }
    return doc;
  };
  pair.assoc_doc = concat(pair.assoc_codes);
  if (!pair.sibling_codes.empty()) pair.sibling_doc = concat(pair.sibling_codes);
  return pair;
}

double mean_label_cosine(const Matrix& a, const Matrix& b) {
  require(a.same_shape(b), "mean_label_cosine: shape mismatch");
  require(a.rows() >= 1, "mean_label_cosine: empty input");
  constexpr double kZeroNorm = 1e-12;
  double sum = 0.0;
  for (int i = 0; i < a.rows(); ++i) {
    double na = row_norm(a, i), nb = row_norm(b, i);
    if (na < kZeroNorm || nb < kZeroNorm) continue;
    sum += dot(a.row(i), b.row(i), a.cols()) / (na * nb);
  }
  return sum / a.rows();
}

double loss_sim(const Matrix& note_repr, const Matrix& assoc_repr) {
  return 1.0 - mean_label_cosine(note_repr, assoc_repr);
}

double loss_dis(const Matrix& note_repr, const Matrix* sibling_repr) {
  if (!sibling_repr) return 0.0;
  return mean_label_cosine(note_repr, *sibling_repr);
}

}  // namespace ahdd
