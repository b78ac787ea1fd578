#include "ahdd/output_head.hpp"

namespace ahdd {

std::vector<double> scores(const Matrix& label_repr, const OutputHead& head,
                           const Matrix& code_matrix) {
  const int num_labels = label_repr.rows();
  const int h = label_repr.cols();
  require(head.class_weights.rows() == h && head.class_weights.cols() == num_labels,
          "scores: class weight shape mismatch");
  std::vector<double> out(num_labels);
  Matrix projected;
  if (head.mode == HeadMode::kDescriptionAware) {
    require(code_matrix.rows() == num_labels && code_matrix.cols() == h,
            "scores: code matrix shape mismatch");
    require(head.desc_proj.rows() == h && head.desc_proj.cols() == h,
            "scores: description projection shape mismatch");
    projected = matmul(code_matrix, head.desc_proj);  // N_L x h
  }
  for (int i = 0; i < num_labels; ++i) {
    double s = 0.0;
    for (int k = 0; k < h; ++k) s += label_repr(i, k) * head.class_weights(k, i);
    if (head.mode == HeadMode::kDescriptionAware)
      s += dot(label_repr.row(i), projected.row(i), h);
    out[i] = s;
  }
  return out;
}

std::vector<double> probabilities(const std::vector<double>& scores) {
  std::vector<double> out(scores.size());
  for (size_t i = 0; i < scores.size(); ++i) {
    require(std::isfinite(scores[i]), "probabilities: non-finite score");
    out[i] = sigmoid(scores[i]);
  }
  return out;
}

}  // namespace ahdd
