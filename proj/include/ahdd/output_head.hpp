#pragma once

#include <vector>

#include "ahdd/matrix.hpp"

namespace ahdd {

enum class HeadMode { kDescriptionAware, kPlain };

// Classification head. Plain mode scores label i as <V_i, W column i>; the
// description-aware mode adds <V_i, (H_C W_l) row i>, the per-label diagonal
// of the pooled product.
struct OutputHead {
  Matrix class_weights;  // h x N_L
  Matrix desc_proj;      // h x h, ignored in plain mode
  HeadMode mode = HeadMode::kDescriptionAware;
};

std::vector<double> scores(const Matrix& label_repr, const OutputHead& head,
                           const Matrix& code_matrix);

// Elementwise logistic sigmoid.
std::vector<double> probabilities(const std::vector<double>& scores);

}  // namespace ahdd
