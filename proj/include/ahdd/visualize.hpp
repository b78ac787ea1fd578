#pragma once

#include <string>
#include <vector>

namespace ahdd {

// Attention export for one (document, code) pair: tokens with their weights.
struct AttentionExport {
  std::vector<std::string> tokens;
  std::vector<double> weights;  // softmax row, sums to 1
};

// `token<TAB>weight` lines, one per position.
std::string attention_tsv(const AttentionExport& exp);

// Standalone HTML page with tokens background-shaded by weight / max weight.
std::string attention_html(const AttentionExport& exp, const std::string& title);

}  // namespace ahdd
