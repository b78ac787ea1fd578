#pragma once

#include <random>
#include <string>
#include <vector>

#include "ahdd/matrix.hpp"

namespace ahdd {

using ParamId = int;

// Named parameter matrices with gradient accumulators and Adam state.
// Gradients accumulate across documents until step() applies the update and
// zero_grad() clears them.
class ParamStore {
 public:
  ParamId add(std::string name, Matrix value);

  int count() const { return static_cast<int>(entries_.size()); }
  const std::string& name(ParamId id) const { return entries_[id].name; }
  ParamId find(const std::string& name) const;  // -1 when absent

  Matrix& value(ParamId id) { return entries_[id].value; }
  const Matrix& value(ParamId id) const { return entries_[id].value; }
  Matrix& grad(ParamId id) { return entries_[id].grad; }
  const Matrix& grad(ParamId id) const { return entries_[id].grad; }

  void zero_grad();
  void scale_grads(double s);

  // Adam update on all parameters; skip_row0 names parameters whose first
  // row stays frozen (the padding embedding).
  void adam_step(double lr, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8);
  void freeze_row0(ParamId id) { entries_[id].freeze_row0 = true; }

  std::vector<std::string> names() const;
  size_t total_values() const;
  bool all_finite() const;

 private:
  struct Entry {
    std::string name;
    Matrix value;
    Matrix grad;
    Matrix m;  // Adam first moment
    Matrix v;  // Adam second moment
    bool freeze_row0 = false;
  };
  std::vector<Entry> entries_;
  long step_count_ = 0;
};

// Uniform(-scale, scale) init; scale defaults to 1/sqrt(rows), the fan-in of
// a right-multiplied weight.
Matrix random_init(int rows, int cols, std::mt19937_64& rng, double scale = 0.0);

}  // namespace ahdd
