#include "ahdd/params.hpp"

#include <cmath>

namespace ahdd {

ParamId ParamStore::add(std::string name, Matrix value) {
  require(find(name) < 0, "params: duplicate parameter '" + name + "'");
  Entry e;
  e.name = std::move(name);
  e.grad = Matrix(value.rows(), value.cols());
  e.m = Matrix(value.rows(), value.cols());
  e.v = Matrix(value.rows(), value.cols());
  e.value = std::move(value);
  entries_.push_back(std::move(e));
  return static_cast<ParamId>(entries_.size()) - 1;
}

ParamId ParamStore::find(const std::string& name) const {
  for (int i = 0; i < count(); ++i)
    if (entries_[i].name == name) return i;
  return -1;
}

void ParamStore::zero_grad() {
  for (auto& e : entries_) e.grad.fill(0.0);
}

void ParamStore::scale_grads(double s) {
  for (auto& e : entries_)
    for (size_t i = 0; i < e.grad.size(); ++i) e.grad.data()[i] *= s;
}

void ParamStore::adam_step(double lr, double beta1, double beta2, double eps) {
  ++step_count_;
  const double bc1 = 1.0 - std::pow(beta1, step_count_);
  const double bc2 = 1.0 - std::pow(beta2, step_count_);
  for (auto& e : entries_) {
    size_t begin = e.freeze_row0 ? static_cast<size_t>(e.value.cols()) : 0;
    double* val = e.value.data();
    double* g = e.grad.data();
    double* m = e.m.data();
    double* v = e.v.data();
    for (size_t i = begin; i < e.value.size(); ++i) {
      m[i] = beta1 * m[i] + (1.0 - beta1) * g[i];
      v[i] = beta2 * v[i] + (1.0 - beta2) * g[i] * g[i];
      val[i] -= lr * (m[i] / bc1) / (std::sqrt(v[i] / bc2) + eps);
    }
  }
}

std::vector<std::string> ParamStore::names() const {
  std::vector<std::string> out;
  for (const auto& e : entries_) out.push_back(e.name);
  return out;
}

size_t ParamStore::total_values() const {
  size_t n = 0;
  for (const auto& e : entries_) n += e.value.size();
  return n;
}

bool ParamStore::all_finite() const {
  for (const auto& e : entries_)
    if (!e.value.all_finite()) return false;
  return true;
}

Matrix random_init(int rows, int cols, std::mt19937_64& rng, double scale) {
  if (scale <= 0.0) scale = 1.0 / std::sqrt(static_cast<double>(rows > 0 ? rows : 1));
  std::uniform_real_distribution<double> dist(-scale, scale);
  Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = dist(rng);
  return m;
}

}  // namespace ahdd
