#include "ahdd/model.hpp"

#include <algorithm>
#include <array>

namespace ahdd {

Model::Model(const ModelConfig& config, const CodeHierarchy& hierarchy, const Vocabulary& vocab)
    : config_(config), hierarchy_(hierarchy), vocab_(vocab) {
  std::mt19937_64 rng(config.seed);
  embeddings_ = add_embedding_table(store_, vocab_.size(), config.emb_dim, rng);
  encoder_ = make_encoder(config.encoder, store_, config.emb_dim, config.hidden_dim, rng,
                          config.conv_kernel_width);
  if (config.desc_aware_attention) {
    query_proj_ = store_.add("attention.query_proj",
                             random_init(config.hidden_dim, config.hidden_dim, rng));
  } else {
    label_queries_ = store_.add("attention.label_queries",
                                random_init(hierarchy_.num_labels(), config.hidden_dim, rng,
                                            1.0 / std::sqrt(config.hidden_dim)));
  }
  class_weights_ = store_.add("head.class_weights",
                              random_init(config.hidden_dim, hierarchy_.num_labels(), rng));
  if (config.desc_aware_output) {
    desc_proj_ =
        store_.add("head.desc_proj", random_init(config.hidden_dim, config.hidden_dim, rng));
  }
  desc_ids_.reserve(hierarchy_.num_labels());
  for (int i = 0; i < hierarchy_.num_labels(); ++i)
    desc_ids_.push_back(vocab_.encode(hierarchy_.node(hierarchy_.code_at(i)).description));
}

VarId Model::attention_queries(Tape& tape, VarId code_matrix) const {
  if (config_.desc_aware_attention)
    return tape.matmul(code_matrix, tape.param(query_proj_));
  return tape.param(label_queries_);
}

VarId Model::score_vector(Tape& tape, VarId label_repr, VarId code_matrix) const {
  VarId s = tape.rowwise_dot(label_repr, tape.transpose_op(tape.param(class_weights_)));
  if (config_.desc_aware_output) {
    VarId projected = tape.matmul(code_matrix, tape.param(desc_proj_));
    s = tape.add(tape.rowwise_dot(label_repr, projected), s);
  }
  return s;
}

Model::LabelReprOut Model::label_repr_for(Tape& tape, VarId queries,
                                          std::span<const int> tokens) const {
  VarId hidden = encoder_->encode(tape, tape.embed(embeddings_, tokens));
  VarId weights = tape.row_softmax(tape.matmul_nt(queries, hidden));
  return {tape.matmul(weights, hidden), weights};
}

Model::Forward Model::forward(Tape& tape, const Document& doc, const ForwardOptions& opts) const {
  require(!doc.tokens.empty(), "forward: empty document");
  const std::vector<char> y = doc.label_vector(hierarchy_);

  ++counters_.code_matrix_builds;
  VarId code_matrix = build_code_matrix(tape, embeddings_, *encoder_, desc_ids_);
  VarId queries = attention_queries(tape, code_matrix);

  auto [note_repr, note_weights] = label_repr_for(tape, queries, doc.tokens);
  VarId probs = tape.sigmoid_op(score_vector(tape, note_repr, code_matrix));
  VarId bce_doc = tape.bce(probs, y);

  Forward out;
  out.attention = note_weights;
  out.losses.bce_doc = tape.val(bce_doc)(0, 0);

  std::vector<VarId> terms{bce_doc};
  std::vector<double> coeffs{1.0};

  std::optional<DistillationPair> pair;
  if (opts.assoc_distill || opts.sibling_distill) {
    require(!doc.labels.empty(), "forward: training document has no gold labels");
    ++counters_.distill_pair_builds;
    pair = build_distillation_pair(doc.labels, hierarchy_, vocab_);
  }

  if (opts.assoc_distill) {
    ++counters_.desc_doc_encodings;
    VarId assoc_repr = label_repr_for(tape, queries, pair->assoc_doc).repr;
    VarId cos_assoc = tape.mean_row_cosine(note_repr, assoc_repr);
    const std::array<VarId, 1> cos_arg{cos_assoc};
    const std::array<double, 1> cos_coeff{-1.0};
    VarId l_sim = tape.affine_scalars(cos_arg, cos_coeff, 1.0);
    VarId assoc_probs = tape.sigmoid_op(score_vector(tape, assoc_repr, code_matrix));
    VarId bce_assoc = tape.bce(assoc_probs, y);
    out.losses.l_sim = tape.val(l_sim)(0, 0);
    out.losses.bce_assoc = tape.val(bce_assoc)(0, 0);
    terms.push_back(l_sim);
    coeffs.push_back(opts.lambda_sim);
    terms.push_back(bce_assoc);
    coeffs.push_back(1.0);
  }

  if (opts.sibling_distill && pair->sibling_doc) {
    ++counters_.desc_doc_encodings;
    VarId sib_repr = label_repr_for(tape, queries, *pair->sibling_doc).repr;
    VarId l_dis = tape.mean_row_cosine(note_repr, sib_repr);
    out.losses.l_dis = tape.val(l_dis)(0, 0);
    terms.push_back(l_dis);
    coeffs.push_back(opts.lambda_dis);
  }

  out.total = tape.affine_scalars(terms, coeffs, 0.0);
  out.losses.total = tape.val(out.total)(0, 0);

  const Matrix& p = tape.val(probs);
  out.probabilities.assign(p.data(), p.data() + p.size());
  return out;
}

void Model::refresh_inference_cache() {
  ++counters_.code_matrix_builds;
  Tape tape(&store_);
  VarId code_matrix = build_code_matrix(tape, embeddings_, *encoder_, desc_ids_);
  InferenceCache cache;
  cache.code_matrix = tape.val(code_matrix);
  cache.queries = config_.desc_aware_attention
                      ? matmul(cache.code_matrix, store_.value(query_proj_))
                      : store_.value(label_queries_);
  if (config_.desc_aware_output)
    cache.projected = matmul(cache.code_matrix, store_.value(desc_proj_));
  cache_ = std::move(cache);
}

std::vector<double> Model::predict_probabilities(const Document& doc) const {
  require(!doc.tokens.empty(), "predict: empty document");
  require(cache_.has_value(), "predict: inference cache not built");
  // Forward-only graph; the tape never writes parameter gradients here.
  Tape tape(const_cast<ParamStore*>(&store_));
  VarId hidden = encoder_->encode(tape, tape.embed(embeddings_, doc.tokens));
  Matrix weights = attention_weights(cache_->queries, tape.val(hidden));
  Matrix repr = label_specific_repr(weights, tape.val(hidden));
  Matrix weights_t = transpose(store_.value(class_weights_));
  std::vector<double> s(num_labels());
  for (int i = 0; i < num_labels(); ++i) {
    s[i] = dot(repr.row(i), weights_t.row(i), repr.cols());
    if (config_.desc_aware_output) s[i] += dot(repr.row(i), cache_->projected.row(i), repr.cols());
  }
  return probabilities(s);
}

std::pair<std::vector<double>, std::set<std::string>> Model::predict(const Document& doc,
                                                                     double threshold) const {
  auto probs = predict_probabilities(doc);
  std::set<std::string> codes;
  for (int i = 0; i < num_labels(); ++i)
    if (probs[i] > threshold) codes.insert(hierarchy_.code_at(i));
  return {std::move(probs), std::move(codes)};
}

std::vector<double> Model::attention_row(const Document& doc, const std::string& code) const {
  require(cache_.has_value(), "attention_row: inference cache not built");
  Tape tape(const_cast<ParamStore*>(&store_));
  VarId hidden = encoder_->encode(tape, tape.embed(embeddings_, doc.tokens));
  Matrix weights = attention_weights(cache_->queries, tape.val(hidden));
  int row = hierarchy_.label_index(code);
  return std::vector<double>(weights.row(row), weights.row(row) + weights.cols());
}

}  // namespace ahdd
