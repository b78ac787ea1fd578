#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ahdd/corpus.hpp"
#include "ahdd/hierarchy.hpp"
#include "ahdd/matrix.hpp"

namespace ahdd {

// Associated- and sibling-code description documents for one training note.
// assoc_doc concatenates the gold codes' descriptions in label_index order;
// sibling_doc concatenates the gold codes' siblings' descriptions, and is
// absent when no gold code has a sibling outside the gold set.
struct DistillationPair {
  std::vector<int> assoc_doc;
  std::optional<std::vector<int>> sibling_doc;
  std::set<std::string> assoc_codes;
  std::set<std::string> sibling_codes;
};

DistillationPair build_distillation_pair(const std::set<std::string>& labels,
                                         const CodeHierarchy& hierarchy,
                                         const Vocabulary& vocab);

// Mean over labels of the cosine of corresponding rows; a row pair where
// either row has norm < 1e-12 contributes 0. Result in [-1, 1].
double mean_label_cosine(const Matrix& a, const Matrix& b);

// 1 - mean_label_cosine, in [0, 2]: pulled toward the associated codes.
double loss_sim(const Matrix& note_repr, const Matrix& assoc_repr);

// mean_label_cosine against the sibling representation, 0 when absent:
// pushed away from the siblings.
double loss_dis(const Matrix& note_repr, const Matrix* sibling_repr);

}  // namespace ahdd
