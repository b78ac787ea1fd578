#include "ahdd/matrix.hpp"

#include <algorithm>

namespace ahdd {

Matrix matmul(const Matrix& a, const Matrix& b) {
  require(a.cols() == b.rows(), "matmul: inner dimensions differ");
  Matrix c(a.rows(), b.cols());
  for (int i = 0; i < a.rows(); ++i) {
    const double* ai = a.row(i);
    double* ci = c.row(i);
    for (int k = 0; k < a.cols(); ++k) {
      const double aik = ai[k];
      if (aik == 0.0) continue;
      const double* bk = b.row(k);
      for (int j = 0; j < b.cols(); ++j) ci[j] += aik * bk[j];
    }
  }
  return c;
}

Matrix matmul_nt(const Matrix& a, const Matrix& b) {
  require(a.cols() == b.cols(), "matmul_nt: inner dimensions differ");
  Matrix c(a.rows(), b.rows());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < b.rows(); ++j) c(i, j) = dot(a.row(i), b.row(j), a.cols());
  return c;
}

Matrix matmul_tn(const Matrix& a, const Matrix& b) {
  require(a.rows() == b.rows(), "matmul_tn: inner dimensions differ");
  Matrix c(a.cols(), b.cols());
  for (int k = 0; k < a.rows(); ++k) {
    const double* ak = a.row(k);
    const double* bk = b.row(k);
    for (int i = 0; i < a.cols(); ++i) {
      const double aki = ak[i];
      if (aki == 0.0) continue;
      double* ci = c.row(i);
      for (int j = 0; j < b.cols(); ++j) ci[j] += aki * bk[j];
    }
  }
  return c;
}

Matrix transpose(const Matrix& a) {
  Matrix t(a.cols(), a.rows());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
  return t;
}

void softmax_rows_inplace(Matrix& m) {
  for (int i = 0; i < m.rows(); ++i) {
    double* r = m.row(i);
    double mx = r[0];
    for (int j = 1; j < m.cols(); ++j) mx = std::max(mx, r[j]);
    double sum = 0.0;
    for (int j = 0; j < m.cols(); ++j) {
      r[j] = std::exp(r[j] - mx);
      sum += r[j];
    }
    for (int j = 0; j < m.cols(); ++j) r[j] /= sum;
  }
}

Matrix maxpool_rows(const Matrix& m, std::vector<int>* argmax) {
  require(m.rows() >= 1, "maxpool_rows: empty input");
  Matrix out(1, m.cols());
  if (argmax) argmax->assign(m.cols(), 0);
  for (int j = 0; j < m.cols(); ++j) {
    double best = m(0, j);
    int arg = 0;
    for (int i = 1; i < m.rows(); ++i) {
      if (m(i, j) > best) {
        best = m(i, j);
        arg = i;
      }
    }
    out(0, j) = best;
    if (argmax) (*argmax)[j] = arg;
  }
  return out;
}

double dot(const double* a, const double* b, int n) {
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

double row_norm(const Matrix& m, int r) {
  return std::sqrt(dot(m.row(r), m.row(r), m.cols()));
}

}  // namespace ahdd
