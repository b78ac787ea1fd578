#include "ahdd/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include <json.hpp>

namespace ahdd {

namespace {

void check_shape(const PredictionMatrix& pred) {
  require(pred.probs.same_shape(pred.gold), "metrics: probs/gold shape mismatch");
  require(pred.probs.rows() >= 1 && pred.probs.cols() >= 1, "metrics: empty prediction matrix");
}

double f1_from_counts(long tp, long fp, long fn) {
  double denom = 2.0 * tp + fp + fn;
  return denom == 0.0 ? 0.0 : 2.0 * tp / denom;
}

// Midrank AUC over one score/label vector; NaN when only one class present.
double rank_auc(const std::vector<double>& scores, const std::vector<char>& gold) {
  const size_t n = scores.size();
  std::vector<size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](size_t a, size_t b) { return scores[a] < scores[b]; });
  std::vector<double> rank(n);
  size_t i = 0;
  while (i < n) {
    size_t j = i;
    while (j + 1 < n && scores[idx[j + 1]] == scores[idx[i]]) ++j;
    double mid = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (size_t k = i; k <= j; ++k) rank[idx[k]] = mid;
    i = j + 1;
  }
  long npos = 0;
  double pos_rank_sum = 0.0;
  for (size_t k = 0; k < n; ++k) {
    if (gold[k]) {
      ++npos;
      pos_rank_sum += rank[k];
    }
  }
  long nneg = static_cast<long>(n) - npos;
  if (npos == 0 || nneg == 0) return std::nan("");
  return (pos_rank_sum - static_cast<double>(npos) * (npos + 1) / 2.0) /
         (static_cast<double>(npos) * nneg);
}

PredictionMatrix restrict_columns(const PredictionMatrix& pred, const std::vector<int>& cols) {
  PredictionMatrix out;
  out.probs = Matrix(pred.probs.rows(), static_cast<int>(cols.size()));
  out.gold = Matrix(pred.gold.rows(), static_cast<int>(cols.size()));
  for (int i = 0; i < pred.probs.rows(); ++i)
    for (size_t j = 0; j < cols.size(); ++j) {
      out.probs(i, static_cast<int>(j)) = pred.probs(i, cols[j]);
      out.gold(i, static_cast<int>(j)) = pred.gold(i, cols[j]);
    }
  return out;
}

const std::vector<std::pair<std::string, std::pair<long, long>>> kFreqBands = {
    {"[1,10]", {1, 10}},
    {"[11,50]", {11, 50}},
    {"[51,100]", {51, 100}},
    {"[101,500]", {101, 500}},
    {"[501,inf)", {501, std::numeric_limits<long>::max()}},
};

const std::vector<std::pair<std::string, std::pair<double, double>>> kLenBands = {
    {"[0,500]", {0.0, 500.0}},
    {"[501,1000]", {500.0, 1000.0}},
    {"[1001,1500]", {1000.0, 1500.0}},
    {"[1501,2000]", {1500.0, 2000.0}},
    {"[2001,inf)", {2000.0, std::numeric_limits<double>::infinity()}},
};

}  // namespace

F1Pair micro_macro_f1(const PredictionMatrix& pred, double threshold) {
  check_shape(pred);
  require(threshold > 0.0 && threshold < 1.0, "micro_macro_f1: threshold must be in (0,1)");
  long tp_all = 0, fp_all = 0, fn_all = 0;
  double macro_sum = 0.0;
  for (int j = 0; j < pred.probs.cols(); ++j) {
    long tp = 0, fp = 0, fn = 0;
    for (int i = 0; i < pred.probs.rows(); ++i) {
      bool hit = pred.probs(i, j) > threshold;
      bool gold = pred.gold(i, j) != 0.0;
      if (hit && gold) ++tp;
      else if (hit) ++fp;
      else if (gold) ++fn;
    }
    macro_sum += f1_from_counts(tp, fp, fn);
    tp_all += tp;
    fp_all += fp;
    fn_all += fn;
  }
  return {macro_sum / pred.probs.cols(), f1_from_counts(tp_all, fp_all, fn_all)};
}

F1Pair micro_macro_auc(const PredictionMatrix& pred) {
  check_shape(pred);
  double macro_sum = 0.0;
  int macro_n = 0;
  std::vector<double> pooled_scores;
  std::vector<char> pooled_gold;
  pooled_scores.reserve(pred.probs.size());
  pooled_gold.reserve(pred.probs.size());
  for (int j = 0; j < pred.probs.cols(); ++j) {
    std::vector<double> scores(pred.probs.rows());
    std::vector<char> gold(pred.probs.rows());
    for (int i = 0; i < pred.probs.rows(); ++i) {
      scores[i] = pred.probs(i, j);
      gold[i] = pred.gold(i, j) != 0.0;
      pooled_scores.push_back(scores[i]);
      pooled_gold.push_back(gold[i]);
    }
    double auc = rank_auc(scores, gold);
    if (!std::isnan(auc)) {
      macro_sum += auc;
      ++macro_n;
    }
  }
  require(macro_n > 0, "micro_macro_auc: no label has both classes present");
  double micro = rank_auc(pooled_scores, pooled_gold);
  require(!std::isnan(micro), "micro_macro_auc: pooled cells contain a single class");
  return {macro_sum / macro_n, micro};
}

double precision_at_k(const PredictionMatrix& pred, int k) {
  check_shape(pred);
  require(k >= 1 && k <= pred.probs.cols(), "precision_at_k: K out of range");
  double sum = 0.0;
  std::vector<int> idx(pred.probs.cols());
  for (int i = 0; i < pred.probs.rows(); ++i) {
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](int a, int b) {
      if (pred.probs(i, a) != pred.probs(i, b)) return pred.probs(i, a) > pred.probs(i, b);
      return a < b;
    });
    int hits = 0;
    for (int r = 0; r < k; ++r)
      if (pred.gold(i, idx[r]) != 0.0) ++hits;
    sum += static_cast<double>(hits) / k;
  }
  return sum / pred.probs.rows();
}

std::map<std::string, F1Pair> frequency_group_f1(const PredictionMatrix& pred,
                                                 const std::vector<long>& train_label_counts,
                                                 double threshold) {
  check_shape(pred);
  require(static_cast<int>(train_label_counts.size()) == pred.probs.cols(),
          "frequency_group_f1: counts must cover all labels");
  std::map<std::string, F1Pair> out;
  for (const auto& [name, range] : kFreqBands) {
    std::vector<int> cols;
    for (int j = 0; j < pred.probs.cols(); ++j)
      if (train_label_counts[j] >= range.first && train_label_counts[j] <= range.second)
        cols.push_back(j);
    if (cols.empty()) continue;
    out[name] = micro_macro_f1(restrict_columns(pred, cols), threshold);
  }
  return out;
}

std::map<std::string, F1Pair> length_group_f1(const PredictionMatrix& pred,
                                              const std::vector<Document>& docs,
                                              const CodeHierarchy& hierarchy, double threshold) {
  check_shape(pred);
  require(static_cast<int>(docs.size()) == pred.probs.rows(),
          "length_group_f1: docs must match prediction rows");
  require(hierarchy.num_labels() == pred.probs.cols(),
          "length_group_f1: hierarchy must match prediction columns");
  std::vector<double> length_sum(pred.probs.cols(), 0.0);
  std::vector<long> carrier_count(pred.probs.cols(), 0);
  for (const auto& doc : docs) {
    for (const auto& code : doc.labels) {
      int j = hierarchy.label_index(code);
      length_sum[j] += static_cast<double>(doc.tokens.size());
      ++carrier_count[j];
    }
  }
  std::map<std::string, F1Pair> out;
  for (const auto& [name, range] : kLenBands) {
    std::vector<int> cols;
    for (int j = 0; j < pred.probs.cols(); ++j) {
      if (carrier_count[j] == 0) continue;  // no note carries this label
      double avg = length_sum[j] / carrier_count[j];
      if (avg > range.first && avg <= range.second) cols.push_back(j);
      else if (range.first == 0.0 && avg == 0.0) cols.push_back(j);
    }
    if (cols.empty()) continue;
    out[name] = micro_macro_f1(restrict_columns(pred, cols), threshold);
  }
  return out;
}

MetricsReport evaluate_predictions(const PredictionMatrix& pred, double threshold,
                                   const std::vector<int>& k_values,
                                   const std::vector<long>* train_label_counts,
                                   const std::vector<Document>* docs,
                                   const CodeHierarchy* hierarchy) {
  MetricsReport report;
  auto f1 = micro_macro_f1(pred, threshold);
  report.macro_f1 = f1.macro;
  report.micro_f1 = f1.micro;
  auto auc = micro_macro_auc(pred);
  report.macro_auc = auc.macro;
  report.micro_auc = auc.micro;
  for (int k : k_values)
    if (k >= 1 && k <= pred.probs.cols()) report.precision_at_k[k] = precision_at_k(pred, k);
  if (train_label_counts)
    report.frequency_group = frequency_group_f1(pred, *train_label_counts, threshold);
  if (docs && hierarchy) report.length_group = length_group_f1(pred, *docs, *hierarchy, threshold);
  return report;
}

std::string MetricsReport::to_json() const {
  nlohmann::json j;
  j["macro_auc"] = macro_auc;
  j["micro_auc"] = micro_auc;
  j["macro_f1"] = macro_f1;
  j["micro_f1"] = micro_f1;
  for (const auto& [k, v] : precision_at_k) j["p_at_" + std::to_string(k)] = v;
  for (const auto& [band, v] : frequency_group) {
    j["f1_freq_" + band + "_macro"] = v.macro;
    j["f1_freq_" + band + "_micro"] = v.micro;
  }
  for (const auto& [band, v] : length_group) {
    j["f1_len_" + band + "_macro"] = v.macro;
    j["f1_len_" + band + "_micro"] = v.micro;
  }
  return j.dump(2);
}

std::string MetricsReport::to_table() const {
  std::ostringstream out;
  char line[128];
  auto row = [&](const std::string& name, double value) {
    std::snprintf(line, sizeof(line), "%-28s %10.4f\n", name.c_str(), value);
    out << line;
  };
  row("macro_auc", macro_auc);
  row("micro_auc", micro_auc);
  row("macro_f1", macro_f1);
  row("micro_f1", micro_f1);
  for (const auto& [k, v] : precision_at_k) row("p_at_" + std::to_string(k), v);
  for (const auto& [band, v] : frequency_group) {
    row("f1_freq_" + band + "_macro", v.macro);
    row("f1_freq_" + band + "_micro", v.micro);
  }
  for (const auto& [band, v] : length_group) {
    row("f1_len_" + band + "_macro", v.macro);
    row("f1_len_" + band + "_micro", v.micro);
  }
  return out.str();
}

}  // namespace ahdd
