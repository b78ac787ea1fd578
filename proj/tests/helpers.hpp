#pragma once

#include <functional>
#include <random>
#include <vector>

#include "ahdd/autodiff.hpp"
#include "ahdd/corpus.hpp"
#include "ahdd/hierarchy.hpp"
#include "ahdd/matrix.hpp"
#include "ahdd/metrics.hpp"
#include "ahdd/model.hpp"

namespace ahdd::testing {

inline Matrix random_matrix(int rows, int cols, std::mt19937_64& rng, double lo = -1.0,
                            double hi = 1.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = dist(rng);
  return m;
}

// Reduces a tape variable to a scalar through random-but-fixed row/column
// weights, so gradients in every entry matter and repeated forwards see the
// same function (as finite differencing requires).
class Scalarizer {
 public:
  Scalarizer(int rows, int cols, std::mt19937_64& rng)
      : left_(random_matrix(1, rows, rng)), right_(random_matrix(cols, 1, rng)) {}

  VarId apply(Tape& tape, VarId x) const {
    return tape.matmul(tape.matmul(tape.constant(left_), x), tape.constant(right_));
  }

 private:
  Matrix left_;
  Matrix right_;
};

// Central-difference check of every parameter entry against the analytic
// gradients the forward's backward() leaves in the store. `forward` must
// rebuild the graph from current parameter values and return the loss;
// when backward is requested it must also run backward().
inline double gradcheck_max_rel_error(ParamStore& store,
                                      const std::function<double(bool)>& forward,
                                      double step = 1e-4) {
  store.zero_grad();
  forward(true);
  std::vector<Matrix> analytic;
  analytic.reserve(store.count());
  for (int p = 0; p < store.count(); ++p) analytic.push_back(store.grad(p));

  double worst = 0.0;
  for (int p = 0; p < store.count(); ++p) {
    Matrix& value = store.value(p);
    for (size_t i = 0; i < value.size(); ++i) {
      const double saved = value.data()[i];
      value.data()[i] = saved + step;
      const double up = forward(false);
      value.data()[i] = saved - step;
      const double down = forward(false);
      value.data()[i] = saved;
      const double numeric = (up - down) / (2.0 * step);
      const double a = analytic[p].data()[i];
      const double mag = std::max(std::abs(a), std::abs(numeric));
      if (mag <= 1e-7) continue;  // both effectively zero
      worst = std::max(worst, std::abs(a - numeric) / mag);
    }
  }
  return worst;
}

// Brute-force metric oracles, kept independent of src/metrics.cpp: plain
// loops over cells and pairwise concordance counting for AUC.

struct OracleF1 {
  double macro = 0.0;
  double micro = 0.0;
};

inline OracleF1 oracle_micro_macro_f1(const PredictionMatrix& pred, double threshold) {
  long tp_all = 0, fp_all = 0, fn_all = 0;
  double macro_sum = 0.0;
  for (int j = 0; j < pred.probs.cols(); ++j) {
    long tp = 0, fp = 0, fn = 0;
    for (int i = 0; i < pred.probs.rows(); ++i) {
      bool hit = pred.probs(i, j) > threshold;
      bool gold = pred.gold(i, j) != 0.0;
      if (hit && gold) ++tp;
      if (hit && !gold) ++fp;
      if (!hit && gold) ++fn;
    }
    double f1 = (2.0 * tp + fp + fn) > 0 ? 2.0 * tp / (2.0 * tp + fp + fn) : 0.0;
    macro_sum += f1;
    tp_all += tp;
    fp_all += fp;
    fn_all += fn;
  }
  OracleF1 out;
  out.macro = macro_sum / pred.probs.cols();
  out.micro = (2.0 * tp_all + fp_all + fn_all) > 0
                  ? 2.0 * tp_all / (2.0 * tp_all + fp_all + fn_all)
                  : 0.0;
  return out;
}

// (concordant + 0.5 * ties) / (pos * neg pairs); NaN when one class missing.
inline double oracle_pair_auc(const std::vector<double>& scores, const std::vector<char>& gold) {
  double concordant = 0.0, ties = 0.0;
  long pairs = 0;
  for (size_t i = 0; i < scores.size(); ++i) {
    if (!gold[i]) continue;
    for (size_t j = 0; j < scores.size(); ++j) {
      if (gold[j]) continue;
      ++pairs;
      if (scores[i] > scores[j]) concordant += 1.0;
      else if (scores[i] == scores[j]) ties += 1.0;
    }
  }
  if (pairs == 0) return std::nan("");
  return (concordant + 0.5 * ties) / static_cast<double>(pairs);
}

inline OracleF1 oracle_micro_macro_auc(const PredictionMatrix& pred) {
  double macro_sum = 0.0;
  int macro_n = 0;
  std::vector<double> pooled_s;
  std::vector<char> pooled_g;
  for (int j = 0; j < pred.probs.cols(); ++j) {
    std::vector<double> s(pred.probs.rows());
    std::vector<char> g(pred.probs.rows());
    for (int i = 0; i < pred.probs.rows(); ++i) {
      s[i] = pred.probs(i, j);
      g[i] = pred.gold(i, j) != 0.0;
      pooled_s.push_back(s[i]);
      pooled_g.push_back(g[i]);
    }
    double auc = oracle_pair_auc(s, g);
    if (!std::isnan(auc)) {
      macro_sum += auc;
      ++macro_n;
    }
  }
  OracleF1 out;
  out.macro = macro_n ? macro_sum / macro_n : std::nan("");
  out.micro = oracle_pair_auc(pooled_s, pooled_g);
  return out;
}

inline double oracle_precision_at_k(const PredictionMatrix& pred, int k) {
  double sum = 0.0;
  for (int i = 0; i < pred.probs.rows(); ++i) {
    std::vector<int> idx(pred.probs.cols());
    for (int j = 0; j < pred.probs.cols(); ++j) idx[j] = j;
    std::stable_sort(idx.begin(), idx.end(),
                     [&](int a, int b) { return pred.probs(i, a) > pred.probs(i, b); });
    int hits = 0;
    for (int r = 0; r < k; ++r)
      if (pred.gold(i, idx[r]) != 0.0) ++hits;
    sum += static_cast<double>(hits) / k;
  }
  return sum / pred.probs.rows();
}

inline PredictionMatrix random_predictions(int docs, int labels, std::mt19937_64& rng) {
  PredictionMatrix pred;
  pred.probs = Matrix(docs, labels);
  pred.gold = Matrix(docs, labels);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < docs; ++i)
    for (int j = 0; j < labels; ++j) {
      pred.probs(i, j) = unit(rng);
      pred.gold(i, j) = unit(rng) < 0.35 ? 1.0 : 0.0;
    }
  return pred;
}

// Small two-family hierarchy with distinct description tokens, plus a
// matching vocabulary: the fixture for model-level tests.
struct TinyFixture {
  CodeHierarchy hierarchy;
  Vocabulary vocab;
};

inline TinyFixture tiny_fixture() {
  std::vector<IcdCode> codes;
  codes.push_back({"a", {"anemia", "general"}, std::nullopt});
  codes.push_back({"a.1", {"anemia", "acute"}, "a"});
  codes.push_back({"a.2", {"anemia", "chronic"}, "a"});
  codes.push_back({"b", {"fracture", "closed"}, std::nullopt});
  TinyFixture fx;
  fx.hierarchy = CodeHierarchy::build(std::move(codes));
  std::vector<std::string> tokens = {"anemia",  "general", "acute", "chronic", "fracture",
                                     "closed",  "fever",   "cough", "pain",    "chest",
                                     "history", "normal",  "blood", "loss",    "patient",
                                     "stable",  "severe",  "mild",  "left",    "right",
                                     "bone",    "scan",    "lab",   "note",    "exam",
                                     "daily",   "dose",    "clear"};
  fx.vocab = Vocabulary(std::move(tokens));
  return fx;
}

inline Document make_doc(const TinyFixture& fx, const std::vector<std::string>& words,
                         const std::set<std::string>& labels, const std::string& id = "doc-0") {
  Document d;
  d.doc_id = id;
  d.tokens = fx.vocab.encode(words);
  d.labels = labels;
  return d;
}

inline Document random_doc(const TinyFixture& fx, int length, std::mt19937_64& rng,
                           const std::set<std::string>& labels) {
  Document d;
  d.doc_id = "rand";
  for (int i = 0; i < length; ++i)
    d.tokens.push_back(2 + static_cast<int>(rng() % (fx.vocab.size() - 2)));
  d.labels = labels;
  return d;
}

}  // namespace ahdd::testing
