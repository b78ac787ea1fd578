#include "ahdd/visualize.hpp"

#include <algorithm>
#include <sstream>

#include "ahdd/error.hpp"

namespace ahdd {

namespace {

std::string escape_html(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string attention_tsv(const AttentionExport& exp) {
  require(exp.tokens.size() == exp.weights.size(), "attention export: token/weight mismatch");
  std::ostringstream out;
  out.precision(10);
  for (size_t i = 0; i < exp.tokens.size(); ++i)
    out << exp.tokens[i] << '\t' << exp.weights[i] << '\n';
  return out.str();
}

std::string attention_html(const AttentionExport& exp, const std::string& title) {
  require(exp.tokens.size() == exp.weights.size(), "attention export: token/weight mismatch");
  double max_w = 0.0;
  for (double w : exp.weights) max_w = std::max(max_w, w);
  if (max_w <= 0.0) max_w = 1.0;

  std::ostringstream out;
  out << "<!DOCTYPE html>\n<html>\n<head>\n<meta charset=\"utf-8\">\n<title>"
      << escape_html(title) << "</title>\n</head>\n<body style=\"font-family:monospace;"
      << "line-height:1.8;max-width:60em;margin:2em auto\">\n<h3>" << escape_html(title)
      << "</h3>\n<p>\n";
  char buf[160];
  for (size_t i = 0; i < exp.tokens.size(); ++i) {
    double alpha = exp.weights[i] / max_w;
    std::snprintf(buf, sizeof(buf),
                  "<span style=\"background:rgba(220,53,69,%.3f)\" title=\"%.6f\">", alpha,
                  exp.weights[i]);
    out << buf << escape_html(exp.tokens[i]) << "</span>\n";
  }
  out << "</p>\n</body>\n</html>\n";
  return out.str();
}

}  // namespace ahdd
