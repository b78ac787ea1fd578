#include "ahdd/attention.hpp"

namespace ahdd {

Matrix attention_weights(const Matrix& queries, const Matrix& hidden) {
  require(hidden.rows() >= 1, "attention_weights: empty hidden matrix");
  require(queries.cols() == hidden.cols(),
          "attention_weights: query width must equal hidden width");
  Matrix logits = matmul_nt(queries, hidden);
  softmax_rows_inplace(logits);
  return logits;
}

Matrix code_aware_attention(const Matrix& code_matrix, const Matrix& query_proj,
                            const Matrix& hidden) {
  return attention_weights(matmul(code_matrix, query_proj), hidden);
}

Matrix plain_label_attention(const Matrix& label_queries, const Matrix& hidden) {
  return attention_weights(label_queries, hidden);
}

Matrix label_specific_repr(const Matrix& weights, const Matrix& hidden) {
  require(weights.cols() == hidden.rows(),
          "label_specific_repr: weight columns must match hidden rows");
  return matmul(weights, hidden);
}

}  // namespace ahdd
