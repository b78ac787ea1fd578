#include "ahdd/checkpoint.hpp"

#include <cstring>
#include <fstream>

#include <json.hpp>

namespace ahdd {

namespace {

constexpr char kMagic[6] = {'A', 'H', 'D', 'D', '1', '\n'};

nlohmann::json config_to_json(const TrainingConfig& c) {
  nlohmann::json j;
  j["lambda_sim"] = c.lambda_sim;
  j["lambda_dis"] = c.lambda_dis;
  j["learning_rate"] = c.learning_rate;
  j["epochs"] = c.epochs;
  j["batch_size"] = c.batch_size;
  j["seed"] = c.seed;
  j["encoder"] = to_string(c.encoder);
  j["no_assoc_distill"] = c.no_assoc_distill;
  j["no_sibling_distill"] = c.no_sibling_distill;
  j["no_desc_attention"] = c.no_desc_attention;
  j["no_desc_output"] = c.no_desc_output;
  j["threshold"] = c.threshold;
  j["emb_dim"] = c.emb_dim;
  j["hidden_dim"] = c.hidden_dim;
  j["conv_kernel_width"] = c.conv_kernel_width;
  j["max_length"] = c.max_length;
  return j;
}

TrainingConfig config_from_json(const nlohmann::json& j) {
  TrainingConfig c;
  c.lambda_sim = j.at("lambda_sim").get<double>();
  c.lambda_dis = j.at("lambda_dis").get<double>();
  c.learning_rate = j.at("learning_rate").get<double>();
  c.epochs = j.at("epochs").get<int>();
  c.batch_size = j.at("batch_size").get<int>();
  c.seed = j.at("seed").get<uint64_t>();
  c.encoder = encoder_kind_from_string(j.at("encoder").get<std::string>());
  c.no_assoc_distill = j.at("no_assoc_distill").get<bool>();
  c.no_sibling_distill = j.at("no_sibling_distill").get<bool>();
  c.no_desc_attention = j.at("no_desc_attention").get<bool>();
  c.no_desc_output = j.at("no_desc_output").get<bool>();
  c.threshold = j.at("threshold").get<double>();
  c.emb_dim = j.at("emb_dim").get<int>();
  c.hidden_dim = j.at("hidden_dim").get<int>();
  c.conv_kernel_width = j.at("conv_kernel_width").get<int>();
  c.max_length = j.at("max_length").get<int>();
  return c;
}

}  // namespace

void save_checkpoint(const std::string& path, const Model& model, const TrainingConfig& config) {
  nlohmann::json header;
  header["config"] = config_to_json(config);
  header["hierarchy_digest"] = model.hierarchy().digest();
  header["vocabulary"] = model.vocab().tokens();
  nlohmann::json manifest = nlohmann::json::array();
  const ParamStore& store = model.params();
  for (int p = 0; p < store.count(); ++p) {
    nlohmann::json entry;
    entry["name"] = store.name(p);
    entry["rows"] = store.value(p).rows();
    entry["cols"] = store.value(p).cols();
    manifest.push_back(entry);
  }
  header["parameters"] = manifest;
  std::string header_str = header.dump();

  std::ofstream out(path, std::ios::binary);
  require(out.good(), "cannot write checkpoint '" + path + "'");
  out.write(kMagic, sizeof(kMagic));
  uint64_t len = header_str.size();
  out.write(reinterpret_cast<const char*>(&len), sizeof(len));
  out.write(header_str.data(), static_cast<std::streamsize>(len));
  for (int p = 0; p < store.count(); ++p) {
    const Matrix& m = store.value(p);
    out.write(reinterpret_cast<const char*>(m.data()),
              static_cast<std::streamsize>(m.size() * sizeof(double)));
  }
  require(out.good(), "checkpoint write failed for '" + path + "'");
}

LoadedCheckpoint load_checkpoint(const std::string& path, const CodeHierarchy& hierarchy) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), "cannot open checkpoint '" + path + "'");
  char magic[6];
  in.read(magic, sizeof(magic));
  require(in.good() && std::memcmp(magic, kMagic, sizeof(kMagic)) == 0,
          "'" + path + "' is not an AHDD1 checkpoint");
  uint64_t len = 0;
  in.read(reinterpret_cast<char*>(&len), sizeof(len));
  std::string header_str(len, '\0');
  in.read(header_str.data(), static_cast<std::streamsize>(len));
  require(in.good(), "checkpoint '" + path + "' is truncated");
  nlohmann::json header = nlohmann::json::parse(header_str, nullptr, false);
  require(!header.is_discarded(), "checkpoint '" + path + "' has a corrupt header");

  uint64_t digest = header.at("hierarchy_digest").get<uint64_t>();
  require(digest == hierarchy.digest(),
          "checkpoint '" + path + "' was trained against a different hierarchy (digest " +
              std::to_string(digest) + " vs " + std::to_string(hierarchy.digest()) + ")");

  LoadedCheckpoint loaded;
  loaded.config = config_from_json(header.at("config"));
  Vocabulary vocab(header.at("vocabulary").get<std::vector<std::string>>());
  loaded.model = std::make_unique<Model>(loaded.config.model_config(), hierarchy, vocab);

  ParamStore& store = loaded.model->params();
  const auto& manifest = header.at("parameters");
  require(static_cast<int>(manifest.size()) == store.count(),
          "checkpoint '" + path + "' parameter inventory mismatch");
  for (int p = 0; p < store.count(); ++p) {
    const auto& entry = manifest.at(p);
    require(entry.at("name").get<std::string>() == store.name(p) &&
                entry.at("rows").get<int>() == store.value(p).rows() &&
                entry.at("cols").get<int>() == store.value(p).cols(),
            "checkpoint '" + path + "' parameter '" + store.name(p) + "' shape/name mismatch");
    Matrix& m = store.value(p);
    in.read(reinterpret_cast<char*>(m.data()),
            static_cast<std::streamsize>(m.size() * sizeof(double)));
  }
  require(in.good(), "checkpoint '" + path + "' is truncated");
  loaded.model->refresh_inference_cache();
  return loaded;
}

}  // namespace ahdd
