#pragma once

#include <map>
#include <string>
#include <vector>

#include "ahdd/corpus.hpp"
#include "ahdd/matrix.hpp"

namespace ahdd {

// Probabilities and binary gold over documents x labels, same shape.
struct PredictionMatrix {
  Matrix probs;
  Matrix gold;
};

struct F1Pair {
  double macro = 0.0;
  double micro = 0.0;
};

// Binarize at the threshold; micro pools TP/FP/FN over all cells, macro
// averages per-label F1 (zero-support labels score 0 and stay in the mean).
F1Pair micro_macro_f1(const PredictionMatrix& pred, double threshold);

// ROC-AUC via midranks. Macro averages labels that have both classes; micro
// pools all cells.
F1Pair micro_macro_auc(const PredictionMatrix& pred);

// Fraction of the top-K scored labels (ties broken by label index) that are
// gold, averaged over documents.
double precision_at_k(const PredictionMatrix& pred, int k);

// Frequency bands over train-split label counts: [1,10], [11,50], [51,100],
// [101,500], [501,inf). Empty bands are omitted.
std::map<std::string, F1Pair> frequency_group_f1(const PredictionMatrix& pred,
                                                 const std::vector<long>& train_label_counts,
                                                 double threshold);

// Bands over the average token length of the notes carrying each label:
// [0,500], [501,1000], [1001,1500], [1501,2000], [2001,inf).
std::map<std::string, F1Pair> length_group_f1(const PredictionMatrix& pred,
                                              const std::vector<Document>& docs,
                                              const CodeHierarchy& hierarchy, double threshold);

struct MetricsReport {
  double macro_auc = 0.0;
  double micro_auc = 0.0;
  double macro_f1 = 0.0;
  double micro_f1 = 0.0;
  std::map<int, double> precision_at_k;
  std::map<std::string, F1Pair> frequency_group;
  std::map<std::string, F1Pair> length_group;

  std::string to_json() const;   // flat object
  std::string to_table() const;  // fixed-width text
};

MetricsReport evaluate_predictions(const PredictionMatrix& pred, double threshold,
                                   const std::vector<int>& k_values,
                                   const std::vector<long>* train_label_counts = nullptr,
                                   const std::vector<Document>* docs = nullptr,
                                   const CodeHierarchy* hierarchy = nullptr);

}  // namespace ahdd
