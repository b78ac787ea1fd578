#include "ahdd/autodiff.hpp"

#include <cmath>

namespace ahdd {

namespace {

constexpr double kBceClampLo = 1e-7;
constexpr double kBceClampHi = 1.0 - 1e-7;
constexpr double kZeroNorm = 1e-12;

void add_into(Matrix& dst, const Matrix& src) {
  for (size_t i = 0; i < dst.size(); ++i) dst.data()[i] += src.data()[i];
}

}  // namespace

Matrix& Tape::grad_of(VarId id) {
  Node& n = nodes_[id];
  if (n.grad.empty()) n.grad = Matrix(n.val.rows(), n.val.cols());
  return n.grad;
}

VarId Tape::constant(Matrix m) {
  Node n;
  n.op = Op::kConst;
  n.val = std::move(m);
  return push(std::move(n));
}

VarId Tape::param(ParamId pid) {
  auto it = param_nodes_.find(pid);
  if (it != param_nodes_.end()) return it->second;
  Node n;
  n.op = Op::kParam;
  n.pid = pid;
  n.val = params_->value(pid);
  VarId id = push(std::move(n));
  param_nodes_[pid] = id;
  return id;
}

VarId Tape::embed(ParamId table, std::span<const int> ids) {
  const Matrix& tab = params_->value(table);
  require(!ids.empty(), "embed: empty token sequence");
  Matrix out(static_cast<int>(ids.size()), tab.cols());
  for (int t = 0; t < out.rows(); ++t) {
    require(ids[t] >= 0 && ids[t] < tab.rows(), "embed: token id out of range");
    for (int j = 0; j < tab.cols(); ++j) out(t, j) = tab(ids[t], j);
  }
  Node n;
  n.op = Op::kEmbed;
  n.pid = table;
  n.ints.assign(ids.begin(), ids.end());
  n.val = std::move(out);
  return push(std::move(n));
}

VarId Tape::matmul(VarId a, VarId b) {
  Matrix out = ahdd::matmul(nodes_[a].val, nodes_[b].val);
  Node n;
  n.op = Op::kMatmul;
  n.args = {a, b};
  n.val = std::move(out);
  return push(std::move(n));
}

VarId Tape::matmul_nt(VarId a, VarId b) {
  Matrix out = ahdd::matmul_nt(nodes_[a].val, nodes_[b].val);
  Node n;
  n.op = Op::kMatmulNT;
  n.args = {a, b};
  n.val = std::move(out);
  return push(std::move(n));
}

VarId Tape::add(VarId a, VarId b) {
  require(nodes_[a].val.same_shape(nodes_[b].val), "add: shape mismatch");
  Matrix out = nodes_[a].val;
  add_into(out, nodes_[b].val);
  Node n;
  n.op = Op::kAdd;
  n.args = {a, b};
  n.val = std::move(out);
  return push(std::move(n));
}

VarId Tape::add_rowvec(VarId a, VarId b) {
  const Matrix& A = nodes_[a].val;
  const Matrix& B = nodes_[b].val;
  require(B.rows() == 1 && B.cols() == A.cols(), "add_rowvec: need 1 x cols bias");
  Matrix out = A;
  for (int i = 0; i < out.rows(); ++i)
    for (int j = 0; j < out.cols(); ++j) out(i, j) += B(0, j);
  Node n;
  n.op = Op::kAddRowVec;
  n.args = {a, b};
  n.val = std::move(out);
  return push(std::move(n));
}

VarId Tape::scale(VarId a, double s) {
  Matrix out = nodes_[a].val;
  for (size_t i = 0; i < out.size(); ++i) out.data()[i] *= s;
  Node n;
  n.op = Op::kScale;
  n.args = {a};
  n.reals = {s};
  n.val = std::move(out);
  return push(std::move(n));
}

VarId Tape::tanh_op(VarId a) {
  Matrix out = nodes_[a].val;
  for (size_t i = 0; i < out.size(); ++i) out.data()[i] = std::tanh(out.data()[i]);
  Node n;
  n.op = Op::kTanh;
  n.args = {a};
  n.val = std::move(out);
  return push(std::move(n));
}

VarId Tape::sigmoid_op(VarId a) {
  Matrix out = nodes_[a].val;
  for (size_t i = 0; i < out.size(); ++i) out.data()[i] = sigmoid(out.data()[i]);
  Node n;
  n.op = Op::kSigmoid;
  n.args = {a};
  n.val = std::move(out);
  return push(std::move(n));
}

VarId Tape::row_softmax(VarId a) {
  require(nodes_[a].val.cols() >= 1, "row_softmax: empty rows");
  Matrix out = nodes_[a].val;
  softmax_rows_inplace(out);
  Node n;
  n.op = Op::kRowSoftmax;
  n.args = {a};
  n.val = std::move(out);
  return push(std::move(n));
}

VarId Tape::maxpool_rows_op(VarId a) {
  std::vector<int> argmax;
  Matrix out = ahdd::maxpool_rows(nodes_[a].val, &argmax);
  Node n;
  n.op = Op::kMaxPoolRows;
  n.args = {a};
  n.ints = std::move(argmax);
  n.val = std::move(out);
  return push(std::move(n));
}

VarId Tape::concat_rows(std::span<const VarId> parts) {
  require(!parts.empty(), "concat_rows: no parts");
  int cols = nodes_[parts[0]].val.cols();
  int rows = 0;
  for (VarId p : parts) {
    require(nodes_[p].val.cols() == cols, "concat_rows: column mismatch");
    rows += nodes_[p].val.rows();
  }
  Matrix out(rows, cols);
  int r = 0;
  for (VarId p : parts) {
    const Matrix& m = nodes_[p].val;
    for (int i = 0; i < m.rows(); ++i, ++r)
      for (int j = 0; j < cols; ++j) out(r, j) = m(i, j);
  }
  Node n;
  n.op = Op::kConcatRows;
  n.args.assign(parts.begin(), parts.end());
  n.val = std::move(out);
  return push(std::move(n));
}

VarId Tape::concat_cols(VarId a, VarId b) {
  const Matrix& A = nodes_[a].val;
  const Matrix& B = nodes_[b].val;
  require(A.rows() == B.rows(), "concat_cols: row mismatch");
  Matrix out(A.rows(), A.cols() + B.cols());
  for (int i = 0; i < A.rows(); ++i) {
    for (int j = 0; j < A.cols(); ++j) out(i, j) = A(i, j);
    for (int j = 0; j < B.cols(); ++j) out(i, A.cols() + j) = B(i, j);
  }
  Node n;
  n.op = Op::kConcatCols;
  n.args = {a, b};
  n.val = std::move(out);
  return push(std::move(n));
}

VarId Tape::slice_rows(VarId a, int r0, int len) {
  const Matrix& A = nodes_[a].val;
  require(r0 >= 0 && len >= 1 && r0 + len <= A.rows(), "slice_rows: out of range");
  Matrix out(len, A.cols());
  for (int i = 0; i < len; ++i)
    for (int j = 0; j < A.cols(); ++j) out(i, j) = A(r0 + i, j);
  Node n;
  n.op = Op::kSliceRows;
  n.args = {a};
  n.ints = {r0, len};
  n.val = std::move(out);
  return push(std::move(n));
}

VarId Tape::transpose_op(VarId a) {
  Matrix out = ahdd::transpose(nodes_[a].val);
  Node n;
  n.op = Op::kTranspose;
  n.args = {a};
  n.val = std::move(out);
  return push(std::move(n));
}

VarId Tape::rowwise_dot(VarId a, VarId b) {
  const Matrix& A = nodes_[a].val;
  const Matrix& B = nodes_[b].val;
  require(A.same_shape(B), "rowwise_dot: shape mismatch");
  Matrix out(A.rows(), 1);
  for (int i = 0; i < A.rows(); ++i) out(i, 0) = dot(A.row(i), B.row(i), A.cols());
  Node n;
  n.op = Op::kRowwiseDot;
  n.args = {a, b};
  n.val = std::move(out);
  return push(std::move(n));
}

VarId Tape::conv1d(VarId x, VarId kernel, VarId bias, int width) {
  const Matrix& X = nodes_[x].val;
  const Matrix& K = nodes_[kernel].val;
  const Matrix& B = nodes_[bias].val;
  require(width >= 1 && width % 2 == 1, "conv1d: kernel width must be odd");
  require(K.rows() == width * X.cols(), "conv1d: kernel rows must be width * input_dim");
  require(B.rows() == 1 && B.cols() == K.cols(), "conv1d: bias must be 1 x hidden");
  const int radius = (width - 1) / 2;
  const int emb = X.cols();
  Matrix out(X.rows(), K.cols());
  for (int t = 0; t < X.rows(); ++t) {
    double* ot = out.row(t);
    for (int j = 0; j < K.cols(); ++j) ot[j] = B(0, j);
    for (int w = 0; w < width; ++w) {
      int src = t + w - radius;
      if (src < 0 || src >= X.rows()) continue;  // same-length zero padding
      const double* xs = X.row(src);
      for (int e = 0; e < emb; ++e) {
        const double xv = xs[e];
        if (xv == 0.0) continue;
        const double* krow = K.row(w * emb + e);
        for (int j = 0; j < K.cols(); ++j) ot[j] += xv * krow[j];
      }
    }
  }
  Node n;
  n.op = Op::kConv1d;
  n.args = {x, kernel, bias};
  n.ints = {width};
  n.val = std::move(out);
  return push(std::move(n));
}

VarId Tape::mean_row_cosine(VarId a, VarId b) {
  const Matrix& A = nodes_[a].val;
  const Matrix& B = nodes_[b].val;
  require(A.same_shape(B), "mean_row_cosine: shape mismatch");
  require(A.rows() >= 1, "mean_row_cosine: empty input");
  double sum = 0.0;
  for (int i = 0; i < A.rows(); ++i) {
    double na = row_norm(A, i), nb = row_norm(B, i);
    if (na < kZeroNorm || nb < kZeroNorm) continue;
    sum += dot(A.row(i), B.row(i), A.cols()) / (na * nb);
  }
  Node n;
  n.op = Op::kMeanRowCosine;
  n.args = {a, b};
  n.val = Matrix(1, 1);
  n.val(0, 0) = sum / A.rows();
  return push(std::move(n));
}

VarId Tape::bce(VarId probs, std::span<const char> targets) {
  const Matrix& P = nodes_[probs].val;
  require(P.size() == targets.size(), "bce: probability/target length mismatch");
  double loss = 0.0;
  for (size_t i = 0; i < P.size(); ++i) {
    double p = std::clamp(P.data()[i], kBceClampLo, kBceClampHi);
    loss -= targets[i] ? std::log(p) : std::log(1.0 - p);
  }
  Node n;
  n.op = Op::kBce;
  n.args = {probs};
  n.targets.assign(targets.begin(), targets.end());
  n.val = Matrix(1, 1);
  n.val(0, 0) = loss;
  return push(std::move(n));
}

VarId Tape::affine_scalars(std::span<const VarId> scalars, std::span<const double> coeffs,
                           double c0) {
  require(scalars.size() == coeffs.size(), "affine_scalars: size mismatch");
  double v = c0;
  for (size_t i = 0; i < scalars.size(); ++i) {
    require(nodes_[scalars[i]].val.size() == 1, "affine_scalars: inputs must be scalars");
    v += coeffs[i] * nodes_[scalars[i]].val(0, 0);
  }
  Node n;
  n.op = Op::kAffineScalars;
  n.args.assign(scalars.begin(), scalars.end());
  n.reals.assign(coeffs.begin(), coeffs.end());
  n.reals.push_back(c0);
  n.val = Matrix(1, 1);
  n.val(0, 0) = v;
  return push(std::move(n));
}

void Tape::backward(VarId root) {
  require(nodes_[root].val.size() == 1, "backward: root must be a scalar");
  grad_of(root)(0, 0) = 1.0;
  for (VarId id = root; id >= 0; --id) {
    if (nodes_[id].grad.empty()) continue;
    backprop_node(id);
  }
}

void Tape::backprop_node(VarId id) {
  Node& n = nodes_[id];
  const Matrix& g = n.grad;
  switch (n.op) {
    case Op::kConst:
      break;
    case Op::kParam:
      add_into(params_->grad(n.pid), g);
      break;
    case Op::kEmbed: {
      Matrix& tg = params_->grad(n.pid);
      for (int t = 0; t < g.rows(); ++t) {
        if (n.ints[t] == 0) continue;  // padding row stays frozen
        double* dst = tg.row(n.ints[t]);
        const double* src = g.row(t);
        for (int j = 0; j < g.cols(); ++j) dst[j] += src[j];
      }
      break;
    }
    case Op::kMatmul: {
      add_into(grad_of(n.args[0]), ahdd::matmul_nt(g, nodes_[n.args[1]].val));
      add_into(grad_of(n.args[1]), ahdd::matmul_tn(nodes_[n.args[0]].val, g));
      break;
    }
    case Op::kMatmulNT: {
      add_into(grad_of(n.args[0]), ahdd::matmul(g, nodes_[n.args[1]].val));
      add_into(grad_of(n.args[1]), ahdd::matmul_tn(g, nodes_[n.args[0]].val));
      break;
    }
    case Op::kAdd:
      add_into(grad_of(n.args[0]), g);
      add_into(grad_of(n.args[1]), g);
      break;
    case Op::kAddRowVec: {
      add_into(grad_of(n.args[0]), g);
      Matrix& db = grad_of(n.args[1]);
      for (int i = 0; i < g.rows(); ++i)
        for (int j = 0; j < g.cols(); ++j) db(0, j) += g(i, j);
      break;
    }
    case Op::kScale: {
      Matrix& da = grad_of(n.args[0]);
      for (size_t i = 0; i < da.size(); ++i) da.data()[i] += n.reals[0] * g.data()[i];
      break;
    }
    case Op::kTanh: {
      Matrix& da = grad_of(n.args[0]);
      for (size_t i = 0; i < da.size(); ++i) {
        double y = n.val.data()[i];
        da.data()[i] += g.data()[i] * (1.0 - y * y);
      }
      break;
    }
    case Op::kSigmoid: {
      Matrix& da = grad_of(n.args[0]);
      for (size_t i = 0; i < da.size(); ++i) {
        double y = n.val.data()[i];
        da.data()[i] += g.data()[i] * y * (1.0 - y);
      }
      break;
    }
    case Op::kRowSoftmax: {
      Matrix& da = grad_of(n.args[0]);
      for (int i = 0; i < g.rows(); ++i) {
        const double* yi = n.val.row(i);
        const double* gi = g.row(i);
        double s = dot(yi, gi, g.cols());
        double* di = da.row(i);
        for (int j = 0; j < g.cols(); ++j) di[j] += yi[j] * (gi[j] - s);
      }
      break;
    }
    case Op::kMaxPoolRows: {
      Matrix& da = grad_of(n.args[0]);
      for (int j = 0; j < g.cols(); ++j) da(n.ints[j], j) += g(0, j);
      break;
    }
    case Op::kConcatRows: {
      int r = 0;
      for (VarId p : n.args) {
        Matrix& dp = grad_of(p);
        for (int i = 0; i < dp.rows(); ++i, ++r)
          for (int j = 0; j < dp.cols(); ++j) dp(i, j) += g(r, j);
      }
      break;
    }
    case Op::kConcatCols: {
      Matrix& da = grad_of(n.args[0]);
      Matrix& db = grad_of(n.args[1]);
      for (int i = 0; i < g.rows(); ++i) {
        for (int j = 0; j < da.cols(); ++j) da(i, j) += g(i, j);
        for (int j = 0; j < db.cols(); ++j) db(i, j) += g(i, da.cols() + j);
      }
      break;
    }
    case Op::kSliceRows: {
      Matrix& da = grad_of(n.args[0]);
      for (int i = 0; i < g.rows(); ++i)
        for (int j = 0; j < g.cols(); ++j) da(n.ints[0] + i, j) += g(i, j);
      break;
    }
    case Op::kTranspose: {
      add_into(grad_of(n.args[0]), ahdd::transpose(g));
      break;
    }
    case Op::kRowwiseDot: {
      const Matrix& A = nodes_[n.args[0]].val;
      const Matrix& B = nodes_[n.args[1]].val;
      Matrix& da = grad_of(n.args[0]);
      Matrix& db = grad_of(n.args[1]);
      for (int i = 0; i < A.rows(); ++i) {
        double gi = g(i, 0);
        for (int j = 0; j < A.cols(); ++j) {
          da(i, j) += gi * B(i, j);
          db(i, j) += gi * A(i, j);
        }
      }
      break;
    }
    case Op::kConv1d: {
      const Matrix& X = nodes_[n.args[0]].val;
      const Matrix& K = nodes_[n.args[1]].val;
      Matrix& dx = grad_of(n.args[0]);
      Matrix& dk = grad_of(n.args[1]);
      Matrix& db = grad_of(n.args[2]);
      const int width = n.ints[0];
      const int radius = (width - 1) / 2;
      const int emb = X.cols();
      for (int t = 0; t < g.rows(); ++t) {
        const double* gt = g.row(t);
        for (int j = 0; j < g.cols(); ++j) db(0, j) += gt[j];
        for (int w = 0; w < width; ++w) {
          int src = t + w - radius;
          if (src < 0 || src >= X.rows()) continue;
          const double* xs = X.row(src);
          double* dxs = dx.row(src);
          for (int e = 0; e < emb; ++e) {
            const double* krow = K.row(w * emb + e);
            double* dkrow = dk.row(w * emb + e);
            double acc = 0.0;
            for (int j = 0; j < g.cols(); ++j) {
              acc += gt[j] * krow[j];
              dkrow[j] += gt[j] * xs[e];
            }
            dxs[e] += acc;
          }
        }
      }
      break;
    }
    case Op::kMeanRowCosine: {
      const Matrix& A = nodes_[n.args[0]].val;
      const Matrix& B = nodes_[n.args[1]].val;
      Matrix& da = grad_of(n.args[0]);
      Matrix& db = grad_of(n.args[1]);
      const double go = g(0, 0) / A.rows();
      for (int i = 0; i < A.rows(); ++i) {
        double na = row_norm(A, i), nb = row_norm(B, i);
        if (na < kZeroNorm || nb < kZeroNorm) continue;
        double d = dot(A.row(i), B.row(i), A.cols());
        double cos_i = d / (na * nb);
        for (int j = 0; j < A.cols(); ++j) {
          da(i, j) += go * (B(i, j) / (na * nb) - cos_i * A(i, j) / (na * na));
          db(i, j) += go * (A(i, j) / (na * nb) - cos_i * B(i, j) / (nb * nb));
        }
      }
      break;
    }
    case Op::kBce: {
      const Matrix& P = nodes_[n.args[0]].val;
      Matrix& dp = grad_of(n.args[0]);
      const double go = g(0, 0);
      for (size_t i = 0; i < P.size(); ++i) {
        double p = P.data()[i];
        if (p <= kBceClampLo || p >= kBceClampHi) continue;  // clamped, flat
        dp.data()[i] += go * (n.targets[i] ? -1.0 / p : 1.0 / (1.0 - p));
      }
      break;
    }
    case Op::kAffineScalars: {
      for (size_t i = 0; i < n.args.size(); ++i)
        grad_of(n.args[i])(0, 0) += n.reals[i] * g(0, 0);
      break;
    }
  }
}

}  // namespace ahdd
