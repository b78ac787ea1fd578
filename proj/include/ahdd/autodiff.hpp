#pragma once

#include <map>
#include <span>
#include <vector>

#include "ahdd/params.hpp"

namespace ahdd {

using VarId = int;

// Reverse-mode tape over Matrix values. One tape per forward pass; backward()
// walks the nodes in reverse and accumulates parameter gradients into the
// ParamStore, so gradients sum naturally across documents in a batch.
//
// Forward-only use never allocates adjoint storage.
class Tape {
 public:
  explicit Tape(ParamStore* params) : params_(params) {}

  const Matrix& val(VarId id) const { return nodes_[id].val; }
  const Matrix& adjoint(VarId id) const { return nodes_[id].grad; }

  VarId constant(Matrix m);
  VarId param(ParamId pid);                       // memoized per tape
  VarId embed(ParamId table, std::span<const int> ids);

  VarId matmul(VarId a, VarId b);                 // A * B
  VarId matmul_nt(VarId a, VarId b);              // A * B^T
  VarId add(VarId a, VarId b);                    // same shape
  VarId add_rowvec(VarId a, VarId b);             // (n x c) + (1 x c) broadcast
  VarId scale(VarId a, double s);
  VarId tanh_op(VarId a);
  VarId sigmoid_op(VarId a);
  VarId row_softmax(VarId a);                     // stabilized, rows sum to 1
  VarId maxpool_rows_op(VarId a);                 // 1 x c
  VarId concat_rows(std::span<const VarId> parts);
  VarId concat_cols(VarId a, VarId b);
  VarId slice_rows(VarId a, int r0, int len);
  VarId transpose_op(VarId a);
  VarId rowwise_dot(VarId a, VarId b);            // n x 1
  VarId conv1d(VarId x, VarId kernel, VarId bias, int width);  // same-length, odd width
  VarId mean_row_cosine(VarId a, VarId b);        // 1 x 1; zero-norm rows contribute 0
  VarId bce(VarId probs, std::span<const char> targets);       // 1 x 1, clamp 1e-7
  // c0 + sum_i coeffs[i] * scalars[i], all 1 x 1.
  VarId affine_scalars(std::span<const VarId> scalars, std::span<const double> coeffs, double c0);

  // Seeds d(root)=1 and accumulates into ParamStore grads. root must be 1x1.
  void backward(VarId root);

  size_t node_count() const { return nodes_.size(); }

 private:
  enum class Op {
    kConst, kParam, kEmbed, kMatmul, kMatmulNT, kAdd, kAddRowVec, kScale,
    kTanh, kSigmoid, kRowSoftmax, kMaxPoolRows, kConcatRows, kConcatCols,
    kSliceRows, kTranspose, kRowwiseDot, kConv1d, kMeanRowCosine, kBce,
    kAffineScalars,
  };
  struct Node {
    Op op;
    Matrix val;
    Matrix grad;
    std::vector<VarId> args;
    // op-specific payloads
    ParamId pid = -1;
    std::vector<int> ints;        // token ids / argmax / slice bounds / width
    std::vector<double> reals;    // scale / coeffs / c0
    std::vector<char> targets;    // bce gold vector
  };

  VarId push(Node n) {
    nodes_.push_back(std::move(n));
    return static_cast<VarId>(nodes_.size()) - 1;
  }
  Matrix& grad_of(VarId id);
  void backprop_node(VarId id);

  ParamStore* params_;
  std::vector<Node> nodes_;
  std::map<ParamId, VarId> param_nodes_;
};

}  // namespace ahdd
