#include "ahdd/run_config.hpp"

#include <cstdlib>
#include <fstream>

namespace ahdd {

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

bool parse_bool(const std::string& v, const std::string& key) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  fail("config: key '" + key + "' expects a boolean, got '" + v + "'");
}

}  // namespace

void RunConfig::apply(const std::string& key, const std::string& value) {
  try {
    if (key == "corpus_dir") corpus_dir = value;
    else if (key == "descriptions") descriptions = value;
    else if (key == "parents") parents = value;
    else if (key == "checkpoint") checkpoint = value;
    else if (key == "output_dir") output_dir = value;
    else if (key == "embeddings_file") embeddings_file = value;
    else if (key == "min_count") min_count = std::stoi(value);
    else if (key == "lambda_sim") training.lambda_sim = std::stod(value);
    else if (key == "lambda_dis") training.lambda_dis = std::stod(value);
    else if (key == "learning_rate") training.learning_rate = std::stod(value);
    else if (key == "epochs") training.epochs = std::stoi(value);
    else if (key == "batch_size") training.batch_size = std::stoi(value);
    else if (key == "seed") training.seed = std::stoull(value);
    else if (key == "encoder") training.encoder = encoder_kind_from_string(value);
    else if (key == "no_ADD") training.no_assoc_distill = parse_bool(value, key);
    else if (key == "no_HDD") training.no_sibling_distill = parse_bool(value, key);
    else if (key == "no_D_att") training.no_desc_attention = parse_bool(value, key);
    else if (key == "no_D_output") training.no_desc_output = parse_bool(value, key);
    else if (key == "threshold") training.threshold = std::stod(value);
    else if (key == "emb_dim") training.emb_dim = std::stoi(value);
    else if (key == "hidden_dim") training.hidden_dim = std::stoi(value);
    else if (key == "conv_kernel_width") training.conv_kernel_width = std::stoi(value);
    else if (key == "max_length") training.max_length = std::stoi(value);
    else fail("config: unknown key '" + key + "'");
  } catch (const std::invalid_argument&) {
    fail("config: key '" + key + "' has a malformed value '" + value + "'");
  } catch (const std::out_of_range&) {
    fail("config: key '" + key + "' has an out-of-range value '" + value + "'");
  }
}

RunConfig RunConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), "cannot open config file '" + path + "'");
  RunConfig config;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    require(eq != std::string::npos,
            path + ":" + std::to_string(lineno) + ": expected key = value");
    config.apply(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return config;
}

void RunConfig::apply_env() {
  if (const char* env_seed = std::getenv("AHDD_SEED")) {
    try {
      training.seed = std::stoull(env_seed);
    } catch (...) {
      fail("AHDD_SEED is not a valid integer: '" + std::string(env_seed) + "'");
    }
  }
}

}  // namespace ahdd
