#pragma once

#include "ahdd/matrix.hpp"

namespace ahdd {

// Label attention over token hidden states. Row i of the result is the
// softmax over positions of <queries_i, H_j>; rows sum to 1. Logits are
// stabilized by max-subtraction, no scaling factor.
Matrix attention_weights(const Matrix& queries, const Matrix& hidden);

// Queries derived from code-description representations: softmax((H_C W_Q) H^T).
Matrix code_aware_attention(const Matrix& code_matrix, const Matrix& query_proj,
                            const Matrix& hidden);

// The learned-query variant (attention of prior label-attention models).
Matrix plain_label_attention(const Matrix& label_queries, const Matrix& hidden);

// V row i = sum_j weights[i,j] * H_j; each coordinate stays inside the
// column range of H.
Matrix label_specific_repr(const Matrix& weights, const Matrix& hidden);

}  // namespace ahdd
