// Python bindings for the main operations: hierarchy/corpus handling, the
// model with its distillation losses, training, prediction, and metrics.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ahdd/checkpoint.hpp"
#include "ahdd/metrics.hpp"
#include "ahdd/synthetic.hpp"
#include "ahdd/trainer.hpp"
#include "ahdd/visualize.hpp"

namespace py = pybind11;
using namespace ahdd;

namespace {

using PyMatrix = std::vector<std::vector<double>>;

Matrix mat_from(const PyMatrix& rows) {
  require(!rows.empty(), "matrix: no rows");
  Matrix m(static_cast<int>(rows.size()), static_cast<int>(rows[0].size()));
  for (int i = 0; i < m.rows(); ++i) {
    require(static_cast<int>(rows[i].size()) == m.cols(), "matrix: ragged rows");
    for (int j = 0; j < m.cols(); ++j) m(i, j) = rows[i][j];
  }
  return m;
}

PyMatrix mat_to(const Matrix& m) {
  PyMatrix rows(m.rows(), std::vector<double>(m.cols()));
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) rows[i][j] = m(i, j);
  return rows;
}

PredictionMatrix predictions_from(const PyMatrix& probs, const PyMatrix& gold) {
  PredictionMatrix pred;
  pred.probs = mat_from(probs);
  pred.gold = mat_from(gold);
  return pred;
}

}  // namespace

PYBIND11_MODULE(_ahdd, m) {
  m.doc() = "Code-description-aware ICD coding: hierarchy, attention, "
            "distillation losses, training, and the evaluation suite";

  py::register_exception<Error>(m, "AhddError");

  m.def("tokenize", &tokenize, py::arg("text"));

  py::class_<Vocabulary>(m, "Vocabulary")
      .def(py::init<std::vector<std::string>>(), py::arg("tokens_by_id"))
      .def("id_of", &Vocabulary::id_of)
      .def("token_of", &Vocabulary::token_of)
      .def("encode", &Vocabulary::encode)
      .def_property_readonly("size", &Vocabulary::size)
      .def_property_readonly("tokens", &Vocabulary::tokens);

  py::class_<IcdCode>(m, "IcdCode")
      .def_readonly("code", &IcdCode::code)
      .def_readonly("description", &IcdCode::description)
      .def_readonly("parent", &IcdCode::parent);

  py::class_<CodeHierarchy>(m, "CodeHierarchy")
      .def_property_readonly("num_labels", &CodeHierarchy::num_labels)
      .def("contains", &CodeHierarchy::contains)
      .def("label_index", &CodeHierarchy::label_index)
      .def("code_at", &CodeHierarchy::code_at)
      .def("codes", &CodeHierarchy::codes)
      .def("children", &CodeHierarchy::children)
      .def("siblings_of", &CodeHierarchy::siblings_of)
      .def("node", &CodeHierarchy::node, py::return_value_policy::reference_internal)
      .def("digest", &CodeHierarchy::digest);

  m.def("load_hierarchy", &load_hierarchy, py::arg("descriptions"),
        py::arg("parents") = std::nullopt);
  m.def(
      "derive_parent",
      [](const std::string& code) { return derive_parent(code, ParentMode::kDotTruncation); },
      py::arg("code"), "Parent by dot truncation, None for root codes");

  py::class_<RawDocument>(m, "RawDocument")
      .def_readonly("doc_id", &RawDocument::doc_id)
      .def_readonly("tokens", &RawDocument::tokens)
      .def_readonly("labels", &RawDocument::labels);

  py::class_<Document>(m, "Document")
      .def(py::init([](std::string doc_id, std::vector<int> tokens,
                       std::set<std::string> labels) {
             Document d;
             d.doc_id = std::move(doc_id);
             d.tokens = std::move(tokens);
             d.labels = std::move(labels);
             return d;
           }),
           py::arg("doc_id"), py::arg("tokens"), py::arg("labels"))
      .def_readonly("doc_id", &Document::doc_id)
      .def_readonly("tokens", &Document::tokens)
      .def_readonly("labels", &Document::labels);

  m.def("load_jsonl_raw", &load_jsonl_raw, py::arg("path"));
  m.def("load_jsonl", &load_jsonl, py::arg("path"), py::arg("vocab"), py::arg("hierarchy"),
        py::arg("max_length"));
  m.def("build_vocab", &build_vocab, py::arg("docs"), py::arg("hierarchy"),
        py::arg("min_count"));

  py::class_<SyntheticSpec>(m, "SyntheticSpec")
      .def(py::init<>())
      .def_readwrite("num_codes", &SyntheticSpec::num_codes)
      .def_readwrite("branching", &SyntheticSpec::branching)
      .def_readwrite("train_docs", &SyntheticSpec::train_docs)
      .def_readwrite("dev_docs", &SyntheticSpec::dev_docs)
      .def_readwrite("test_docs", &SyntheticSpec::test_docs)
      .def_readwrite("note_length", &SyntheticSpec::note_length)
      .def_readwrite("signal_fraction", &SyntheticSpec::signal_fraction)
      .def_readwrite("vocab_size", &SyntheticSpec::vocab_size)
      .def_readwrite("seed", &SyntheticSpec::seed);

  m.def(
      "generate_synthetic",
      [](const SyntheticSpec& spec, const std::string& out_dir) {
        auto paths = generate_synthetic(spec, out_dir);
        py::dict d;
        d["train"] = paths.train_jsonl;
        d["dev"] = paths.dev_jsonl;
        d["test"] = paths.test_jsonl;
        d["descriptions"] = paths.description_tsv;
        return d;
      },
      py::arg("spec"), py::arg("out_dir"));

  // distillation losses on plain nested lists
  m.def(
      "mean_label_cosine",
      [](const PyMatrix& a, const PyMatrix& b) {
        return mean_label_cosine(mat_from(a), mat_from(b));
      },
      py::arg("a"), py::arg("b"));
  m.def(
      "loss_sim",
      [](const PyMatrix& note, const PyMatrix& assoc) {
        return loss_sim(mat_from(note), mat_from(assoc));
      },
      py::arg("note_repr"), py::arg("assoc_repr"));
  m.def(
      "loss_dis",
      [](const PyMatrix& note, const std::optional<PyMatrix>& sibling) {
        if (!sibling) return loss_dis(mat_from(note), nullptr);
        Matrix s = mat_from(*sibling);
        return loss_dis(mat_from(note), &s);
      },
      py::arg("note_repr"), py::arg("sibling_repr") = std::nullopt);

  m.def(
      "attention_weights",
      [](const PyMatrix& queries, const PyMatrix& hidden) {
        return mat_to(attention_weights(mat_from(queries), mat_from(hidden)));
      },
      py::arg("queries"), py::arg("hidden"));
  m.def(
      "label_specific_repr",
      [](const PyMatrix& weights, const PyMatrix& hidden) {
        return mat_to(label_specific_repr(mat_from(weights), mat_from(hidden)));
      },
      py::arg("weights"), py::arg("hidden"));

  py::class_<TrainingConfig>(m, "TrainingConfig")
      .def(py::init<>())
      .def_readwrite("lambda_sim", &TrainingConfig::lambda_sim)
      .def_readwrite("lambda_dis", &TrainingConfig::lambda_dis)
      .def_readwrite("learning_rate", &TrainingConfig::learning_rate)
      .def_readwrite("epochs", &TrainingConfig::epochs)
      .def_readwrite("batch_size", &TrainingConfig::batch_size)
      .def_readwrite("seed", &TrainingConfig::seed)
      .def_property(
          "encoder", [](const TrainingConfig& c) { return to_string(c.encoder); },
          [](TrainingConfig& c, const std::string& s) { c.encoder = encoder_kind_from_string(s); })
      .def_readwrite("no_assoc_distill", &TrainingConfig::no_assoc_distill)
      .def_readwrite("no_sibling_distill", &TrainingConfig::no_sibling_distill)
      .def_readwrite("no_desc_attention", &TrainingConfig::no_desc_attention)
      .def_readwrite("no_desc_output", &TrainingConfig::no_desc_output)
      .def_readwrite("threshold", &TrainingConfig::threshold)
      .def_readwrite("emb_dim", &TrainingConfig::emb_dim)
      .def_readwrite("hidden_dim", &TrainingConfig::hidden_dim)
      .def_readwrite("conv_kernel_width", &TrainingConfig::conv_kernel_width)
      .def_readwrite("max_length", &TrainingConfig::max_length);

  py::class_<EpochLog>(m, "EpochLog")
      .def_readonly("epoch", &EpochLog::epoch)
      .def_readonly("bce_doc", &EpochLog::bce_doc)
      .def_readonly("bce_assoc", &EpochLog::bce_assoc)
      .def_readonly("l_sim", &EpochLog::l_sim)
      .def_readonly("l_dis", &EpochLog::l_dis)
      .def_readonly("total", &EpochLog::total)
      .def_readonly("dev_micro_f1", &EpochLog::dev_micro_f1);

  py::class_<Model>(m, "Model")
      .def(py::init([](const TrainingConfig& config, const CodeHierarchy& hierarchy,
                       const Vocabulary& vocab) {
             return std::make_unique<Model>(config.model_config(), hierarchy, vocab);
           }),
           py::arg("config"), py::arg("hierarchy"), py::arg("vocab"))
      .def("refresh_inference_cache", &Model::refresh_inference_cache)
      .def("predict_probabilities", &Model::predict_probabilities, py::arg("doc"))
      .def("predict", &Model::predict, py::arg("doc"), py::arg("threshold"))
      .def("attention_row", &Model::attention_row, py::arg("doc"), py::arg("code"))
      .def_property_readonly("num_labels", &Model::num_labels)
      .def_property_readonly("parameter_names",
                             [](const Model& model) { return model.params().names(); })
      .def_property_readonly("vocab", &Model::vocab,
                             py::return_value_policy::reference_internal)
      .def_property_readonly("hierarchy", &Model::hierarchy,
                             py::return_value_policy::reference_internal);

  py::class_<TrainResult>(m, "TrainResult")
      .def_readonly("epochs", &TrainResult::epochs)
      .def_readonly("best_epoch", &TrainResult::best_epoch)
      .def_readonly("best_dev_micro_f1", &TrainResult::best_dev_micro_f1);

  m.def("train", &train, py::arg("model"), py::arg("train_docs"), py::arg("dev_docs"),
        py::arg("config"),
        py::call_guard<py::gil_scoped_release>());

  m.def("save_checkpoint", &save_checkpoint, py::arg("path"), py::arg("model"),
        py::arg("config"));
  m.def(
      "load_checkpoint",
      [](const std::string& path, const CodeHierarchy& hierarchy) {
        auto loaded = load_checkpoint(path, hierarchy);
        return py::make_tuple(std::move(loaded.model), loaded.config);
      },
      py::arg("path"), py::arg("hierarchy"));

  // metrics over nested lists
  m.def(
      "micro_macro_f1",
      [](const PyMatrix& probs, const PyMatrix& gold, double threshold) {
        auto r = micro_macro_f1(predictions_from(probs, gold), threshold);
        return py::make_tuple(r.macro, r.micro);
      },
      py::arg("probs"), py::arg("gold"), py::arg("threshold") = 0.5);
  m.def(
      "micro_macro_auc",
      [](const PyMatrix& probs, const PyMatrix& gold) {
        auto r = micro_macro_auc(predictions_from(probs, gold));
        return py::make_tuple(r.macro, r.micro);
      },
      py::arg("probs"), py::arg("gold"));
  m.def(
      "precision_at_k",
      [](const PyMatrix& probs, const PyMatrix& gold, int k) {
        return precision_at_k(predictions_from(probs, gold), k);
      },
      py::arg("probs"), py::arg("gold"), py::arg("k"));

  m.def(
      "bce",
      [](const std::vector<double>& probs, const std::vector<int>& targets) {
        std::vector<char> y(targets.size());
        for (size_t i = 0; i < targets.size(); ++i) y[i] = targets[i] ? 1 : 0;
        return bce(probs, y);
      },
      py::arg("probs"), py::arg("targets"));

  m.attr("__version__") = "0.1.0";
}
