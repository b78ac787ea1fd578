// Command-line entry points: generate / train / evaluate / visualize /
// inspect-hierarchy. See README.md for usage examples.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include <json.hpp>

#include "ahdd/checkpoint.hpp"
#include "ahdd/metrics.hpp"
#include "ahdd/run_config.hpp"
#include "ahdd/synthetic.hpp"
#include "ahdd/trainer.hpp"
#include "ahdd/visualize.hpp"

namespace fs = std::filesystem;
using namespace ahdd;

namespace {

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), "cannot write '" + path + "'");
  out << content;
  require(out.good(), "write failed for '" + path + "'");
}

CodeHierarchy load_hierarchy_from(const RunConfig& cfg) {
  require(!cfg.descriptions.empty(), "missing --descriptions (code<TAB>description TSV)");
  std::optional<std::string> parents;
  if (!cfg.parents.empty()) parents = cfg.parents;
  return load_hierarchy(cfg.descriptions, parents);
}

std::string split_path(const RunConfig& cfg, const std::string& split) {
  require(!cfg.corpus_dir.empty(), "missing --corpus (directory with train/dev/test.jsonl)");
  return (fs::path(cfg.corpus_dir) / (split + ".jsonl")).string();
}

int cmd_generate(const SyntheticSpec& spec, const std::string& out_dir) {
  auto paths = generate_synthetic(spec, out_dir);
  nlohmann::json manifest;
  manifest["seed"] = spec.seed;
  manifest["num_codes"] = spec.num_codes;
  manifest["branching"] = spec.branching;
  manifest["train_docs"] = spec.train_docs;
  manifest["dev_docs"] = spec.dev_docs;
  manifest["test_docs"] = spec.test_docs;
  manifest["note_length"] = spec.note_length;
  manifest["signal_fraction"] = spec.signal_fraction;
  manifest["vocab_size"] = spec.vocab_size;
  manifest["files"] = {paths.train_jsonl, paths.dev_jsonl, paths.test_jsonl,
                       paths.description_tsv};
  write_file((fs::path(out_dir) / "manifest.json").string(), manifest.dump(2) + "\n");
  for (const auto& p : {paths.train_jsonl, paths.dev_jsonl, paths.test_jsonl,
                        paths.description_tsv})
    require(fs::exists(p) && fs::file_size(p) > 0, "declared output missing: " + p);
  std::cout << "generated corpus under " << out_dir << " (seed " << spec.seed << ")\n";
  return 0;
}

int cmd_train(const RunConfig& cfg) {
  cfg.training.validate();
  auto hierarchy = load_hierarchy_from(cfg);
  auto train_raw = load_jsonl_raw(split_path(cfg, "train"));
  require(!train_raw.empty(), "training split is empty");
  auto vocab = build_vocab(train_raw, hierarchy, cfg.min_count);

  auto train_docs = load_jsonl(split_path(cfg, "train"), vocab, hierarchy,
                               cfg.training.max_length);
  auto dev_docs = load_jsonl(split_path(cfg, "dev"), vocab, hierarchy, cfg.training.max_length);

  Model model(cfg.training.model_config(), hierarchy, vocab);
  if (!cfg.embeddings_file.empty())
    load_embedding_file(model.params(), model.params().find("embeddings"), vocab,
                        cfg.embeddings_file);

  auto result = train(model, train_docs, dev_docs, cfg.training);

  fs::create_directories(cfg.output_dir);
  const std::string ckpt = (fs::path(cfg.output_dir) / "checkpoint.ahdd").string();
  const std::string log = (fs::path(cfg.output_dir) / "train_log.tsv").string();
  save_checkpoint(ckpt, model, cfg.training);
  write_file(log, loss_log_tsv(result.epochs));
  require(fs::exists(ckpt) && fs::file_size(ckpt) > 0, "declared output missing: " + ckpt);
  require(fs::exists(log) && fs::file_size(log) > 0, "declared output missing: " + log);
  std::cout << "best dev micro-F1 " << result.best_dev_micro_f1 << " at epoch "
            << result.best_epoch << "\ncheckpoint: " << ckpt << "\nloss log: " << log << "\n";
  return 0;
}

PredictionMatrix predictions_for(const Model& model, const std::vector<Document>& docs) {
  PredictionMatrix pred;
  pred.probs = Matrix(static_cast<int>(docs.size()), model.num_labels());
  pred.gold = Matrix(static_cast<int>(docs.size()), model.num_labels());
  for (size_t i = 0; i < docs.size(); ++i) {
    auto probs = model.predict_probabilities(docs[i]);
    auto gold = docs[i].label_vector(model.hierarchy());
    for (int j = 0; j < model.num_labels(); ++j) {
      pred.probs(static_cast<int>(i), j) = probs[j];
      pred.gold(static_cast<int>(i), j) = gold[j];
    }
  }
  return pred;
}

int cmd_evaluate(const RunConfig& cfg, const std::string& split, std::vector<int> k_values) {
  require(!cfg.checkpoint.empty(), "missing --checkpoint");
  auto hierarchy = load_hierarchy_from(cfg);
  auto loaded = load_checkpoint(cfg.checkpoint, hierarchy);
  Model& model = *loaded.model;

  auto docs = load_jsonl(split_path(cfg, split), model.vocab(), hierarchy,
                         loaded.config.max_length);
  require(!docs.empty(), "evaluation split '" + split + "' is empty");

  std::vector<long> train_counts(hierarchy.num_labels(), 0);
  for (const auto& raw : load_jsonl_raw(split_path(cfg, "train")))
    for (const auto& code : raw.labels)
      if (hierarchy.contains(code)) ++train_counts[hierarchy.label_index(code)];

  auto pred = predictions_for(model, docs);
  auto report = evaluate_predictions(pred, loaded.config.threshold, k_values, &train_counts,
                                     &docs, &hierarchy);

  fs::create_directories(cfg.output_dir);
  const std::string json_path = (fs::path(cfg.output_dir) / "metrics.json").string();
  const std::string table_path = (fs::path(cfg.output_dir) / "metrics.txt").string();
  write_file(json_path, report.to_json() + "\n");
  write_file(table_path, report.to_table());
  std::cout << report.to_table();
  std::cout << "metrics written to " << json_path << " and " << table_path << "\n";
  return 0;
}

int cmd_visualize(const RunConfig& cfg, const std::string& split, const std::string& doc_id,
                  const std::string& code) {
  require(!cfg.checkpoint.empty(), "missing --checkpoint");
  auto hierarchy = load_hierarchy_from(cfg);
  require(hierarchy.contains(code), "unknown code '" + code + "'");
  auto loaded = load_checkpoint(cfg.checkpoint, hierarchy);
  Model& model = *loaded.model;

  auto docs = load_jsonl(split_path(cfg, split), model.vocab(), hierarchy,
                         loaded.config.max_length);
  const Document* doc = nullptr;
  for (const auto& d : docs)
    if (d.doc_id == doc_id) doc = &d;
  require(doc != nullptr, "document '" + doc_id + "' not found in split '" + split + "'");

  AttentionExport exp;
  exp.weights = model.attention_row(*doc, code);
  for (int id : doc->tokens) exp.tokens.push_back(model.vocab().token_of(id));

  fs::create_directories(cfg.output_dir);
  std::string stem = "attention_" + doc_id + "_" + code;
  for (auto& ch : stem)
    if (ch == '/' || ch == '\\') ch = '_';
  const std::string tsv_path = (fs::path(cfg.output_dir) / (stem + ".tsv")).string();
  const std::string html_path = (fs::path(cfg.output_dir) / (stem + ".html")).string();
  write_file(tsv_path, attention_tsv(exp));
  write_file(html_path, attention_html(exp, doc_id + " / " + code));
  std::cout << "attention export: " << tsv_path << ", " << html_path << "\n";
  return 0;
}

int cmd_inspect(const RunConfig& cfg, const std::string& code) {
  auto hierarchy = load_hierarchy_from(cfg);
  auto print_one = [&](const std::string& c) {
    const auto& node = hierarchy.node(c);
    std::cout << "code: " << c << "\n  index: " << hierarchy.label_index(c)
              << "\n  parent: " << (node.parent ? *node.parent : "-") << "\n  description:";
    for (const auto& t : node.description) std::cout << ' ' << t;
    std::cout << "\n  children:";
    for (const auto& k : hierarchy.children(c)) std::cout << ' ' << k;
    std::cout << "\n  siblings:";
    for (const auto& s : hierarchy.siblings_of(c)) std::cout << ' ' << s;
    std::cout << "\n";
  };
  if (!code.empty()) {
    require(hierarchy.contains(code), "unknown code '" + code + "'");
    print_one(code);
  } else {
    std::cout << hierarchy.num_labels() << " codes\n";
    for (const auto& c : hierarchy.codes()) print_one(c);
  }
  return 0;
}

// Returns the final RunConfig: file < environment < explicit flags.
RunConfig resolve_config(const std::string& config_file,
                         const std::function<void(RunConfig&)>& apply_flags) {
  RunConfig cfg;
  if (!config_file.empty()) cfg = RunConfig::from_file(config_file);
  cfg.apply_env();
  apply_flags(cfg);
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Code-description-aware ICD coding toolkit"};
  app.require_subcommand(1);

  // generate
  auto* gen = app.add_subcommand("generate", "Write a synthetic corpus and hierarchy");
  SyntheticSpec spec;
  std::string gen_out = "data";
  gen->add_option("--out", gen_out, "Output directory");
  gen->add_option("--num-codes", spec.num_codes, "Leaf codes");
  gen->add_option("--branching", spec.branching, "Leaf codes per parent group");
  gen->add_option("--train-docs", spec.train_docs, "Training documents");
  gen->add_option("--dev-docs", spec.dev_docs, "Dev documents");
  gen->add_option("--test-docs", spec.test_docs, "Test documents");
  gen->add_option("--note-length", spec.note_length, "Tokens per note");
  gen->add_option("--signal-fraction", spec.signal_fraction, "Fraction of signal tokens");
  gen->add_option("--vocab-size", spec.vocab_size, "Keyword + noise vocabulary size");
  gen->add_option("--seed", spec.seed, "Random seed");

  // shared options helper for train/evaluate/visualize
  struct CommonFlags {
    std::string config_file, corpus, descriptions, parents, checkpoint, out;
  };
  auto add_common = [](CLI::App* cmd, CommonFlags& f, bool needs_checkpoint) {
    cmd->add_option("--config", f.config_file, "key = value config file");
    cmd->add_option("--corpus", f.corpus, "Corpus directory (train/dev/test.jsonl)");
    cmd->add_option("--descriptions", f.descriptions, "code<TAB>description TSV");
    cmd->add_option("--parents", f.parents, "code<TAB>parent TSV (overrides dot truncation)");
    cmd->add_option("--out", f.out, "Output directory");
    if (needs_checkpoint) cmd->add_option("--checkpoint", f.checkpoint, "Model checkpoint");
  };
  auto apply_common = [](const CommonFlags& f, RunConfig& cfg) {
    if (!f.corpus.empty()) cfg.corpus_dir = f.corpus;
    if (!f.descriptions.empty()) cfg.descriptions = f.descriptions;
    if (!f.parents.empty()) cfg.parents = f.parents;
    if (!f.checkpoint.empty()) cfg.checkpoint = f.checkpoint;
    if (!f.out.empty()) cfg.output_dir = f.out;
  };

  // train
  auto* tr = app.add_subcommand("train", "Train a model and write a checkpoint");
  CommonFlags tr_flags;
  add_common(tr, tr_flags, false);
  double lr = 0, lambda_sim = 0, lambda_dis = 0, threshold = 0;
  int epochs = 0, batch_size = 0, emb_dim = 0, hidden_dim = 0, max_length = 0, min_count = 0;
  int conv_width = 0;
  uint64_t seed = 0;
  std::string encoder, embeddings_file;
  bool no_add = false, no_hdd = false, no_datt = false, no_dout = false;
  tr->add_option("--encoder", encoder, "linear | conv | birnn");
  tr->add_option("--epochs", epochs, "Training epochs");
  tr->add_option("--batch-size", batch_size, "Documents per gradient step");
  tr->add_option("--lr", lr, "Learning rate");
  tr->add_option("--lambda-sim", lambda_sim, "Associated-description loss weight");
  tr->add_option("--lambda-dis", lambda_dis, "Sibling-description loss weight");
  tr->add_option("--threshold", threshold, "Decision threshold");
  tr->add_option("--seed", seed, "Random seed");
  tr->add_option("--emb-dim", emb_dim, "Embedding width");
  tr->add_option("--hidden-dim", hidden_dim, "Hidden width");
  tr->add_option("--conv-kernel-width", conv_width, "Convolution kernel width");
  tr->add_option("--max-length", max_length, "Note truncation length");
  tr->add_option("--min-count", min_count, "Vocabulary frequency cutoff");
  tr->add_option("--embeddings-file", embeddings_file, "Pre-trained embedding text file");
  tr->add_flag("--no-ADD", no_add, "Drop associated-description distillation");
  tr->add_flag("--no-HDD", no_hdd, "Drop sibling-description distillation");
  tr->add_flag("--no-D-att", no_datt, "Plain learned-query attention");
  tr->add_flag("--no-D-output", no_dout, "Plain classification head");

  // evaluate
  auto* ev = app.add_subcommand("evaluate", "Score a checkpoint on a split");
  CommonFlags ev_flags;
  add_common(ev, ev_flags, true);
  std::string ev_split = "test";
  std::vector<int> k_values;
  ev->add_option("--split", ev_split, "train | dev | test");
  ev->add_option("--k", k_values, "Precision@K cutoffs (repeatable)");

  // visualize
  auto* vis = app.add_subcommand("visualize", "Export one code's attention over one note");
  CommonFlags vis_flags;
  add_common(vis, vis_flags, true);
  std::string vis_split = "test", vis_doc, vis_code;
  vis->add_option("--split", vis_split, "train | dev | test");
  vis->add_option("--doc-id", vis_doc, "Document id")->required();
  vis->add_option("--code", vis_code, "Code whose attention row to export")->required();

  // inspect-hierarchy
  auto* ins = app.add_subcommand("inspect-hierarchy", "Print codes, parents, and siblings");
  CommonFlags ins_flags;
  add_common(ins, ins_flags, false);
  std::string ins_code;
  ins->add_option("--code", ins_code, "Single code to inspect");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      if (!gen->count("--seed")) {
        if (const char* env_seed = std::getenv("AHDD_SEED")) spec.seed = std::stoull(env_seed);
      }
      return cmd_generate(spec, gen_out);
    }
    if (tr->parsed()) {
      RunConfig cfg = resolve_config(tr_flags.config_file, [&](RunConfig& c) {
        apply_common(tr_flags, c);
        if (tr->count("--encoder")) c.training.encoder = encoder_kind_from_string(encoder);
        if (tr->count("--epochs")) c.training.epochs = epochs;
        if (tr->count("--batch-size")) c.training.batch_size = batch_size;
        if (tr->count("--lr")) c.training.learning_rate = lr;
        if (tr->count("--lambda-sim")) c.training.lambda_sim = lambda_sim;
        if (tr->count("--lambda-dis")) c.training.lambda_dis = lambda_dis;
        if (tr->count("--threshold")) c.training.threshold = threshold;
        if (tr->count("--seed")) c.training.seed = seed;
        if (tr->count("--emb-dim")) c.training.emb_dim = emb_dim;
        if (tr->count("--hidden-dim")) c.training.hidden_dim = hidden_dim;
        if (tr->count("--conv-kernel-width")) c.training.conv_kernel_width = conv_width;
        if (tr->count("--max-length")) c.training.max_length = max_length;
        if (tr->count("--min-count")) c.min_count = min_count;
        if (tr->count("--embeddings-file")) c.embeddings_file = embeddings_file;
        if (no_add) c.training.no_assoc_distill = true;
        if (no_hdd) c.training.no_sibling_distill = true;
        if (no_datt) c.training.no_desc_attention = true;
        if (no_dout) c.training.no_desc_output = true;
      });
      return cmd_train(cfg);
    }
    if (ev->parsed()) {
      RunConfig cfg = resolve_config(ev_flags.config_file,
                                     [&](RunConfig& c) { apply_common(ev_flags, c); });
      if (k_values.empty()) k_values = {5, 8};
      return cmd_evaluate(cfg, ev_split, k_values);
    }
    if (vis->parsed()) {
      RunConfig cfg = resolve_config(vis_flags.config_file,
                                     [&](RunConfig& c) { apply_common(vis_flags, c); });
      return cmd_visualize(cfg, vis_split, vis_doc, vis_code);
    }
    if (ins->parsed()) {
      RunConfig cfg = resolve_config(ins_flags.config_file,
                                     [&](RunConfig& c) { apply_common(ins_flags, c); });
      return cmd_inspect(cfg, ins_code);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
