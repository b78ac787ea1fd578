#include "ahdd/encoder.hpp"

#include <fstream>
#include <sstream>

#include "ahdd/corpus.hpp"

namespace ahdd {

EncoderKind encoder_kind_from_string(const std::string& s) {
  if (s == "linear") return EncoderKind::kLinear;
  if (s == "conv") return EncoderKind::kConv;
  if (s == "birnn") return EncoderKind::kBiRnn;
  fail("unknown encoder kind '" + s + "' (expected linear, conv, or birnn)");
}

std::string to_string(EncoderKind k) {
  switch (k) {
    case EncoderKind::kLinear: return "linear";
    case EncoderKind::kConv: return "conv";
    case EncoderKind::kBiRnn: return "birnn";
  }
  return "?";
}

LinearEncoder::LinearEncoder(ParamStore& store, int emb_dim, int hidden_dim,
                             std::mt19937_64& rng, const std::string& prefix)
    : Encoder(hidden_dim),
      weight_(store.add(prefix + ".weight", random_init(emb_dim, hidden_dim, rng))),
      bias_(store.add(prefix + ".bias", Matrix(1, hidden_dim))) {}

VarId LinearEncoder::encode(Tape& tape, VarId embeddings) const {
  require(tape.val(embeddings).rows() >= 1, "encode: empty input");
  return tape.add_rowvec(tape.matmul(embeddings, tape.param(weight_)), tape.param(bias_));
}

ConvEncoder::ConvEncoder(ParamStore& store, int emb_dim, int hidden_dim, int kernel_width,
                         std::mt19937_64& rng, const std::string& prefix)
    : Encoder(hidden_dim),
      kernel_(store.add(prefix + ".kernel",
                        random_init(kernel_width * emb_dim, hidden_dim, rng))),
      bias_(store.add(prefix + ".bias", Matrix(1, hidden_dim))),
      width_(kernel_width) {
  require(kernel_width >= 1 && kernel_width % 2 == 1, "conv encoder: kernel width must be odd");
}

VarId ConvEncoder::encode(Tape& tape, VarId embeddings) const {
  require(tape.val(embeddings).rows() >= 1, "encode: empty input");
  return tape.conv1d(embeddings, tape.param(kernel_), tape.param(bias_), width_);
}

BiRnnEncoder::BiRnnEncoder(ParamStore& store, int emb_dim, int hidden_dim,
                           std::mt19937_64& rng, const std::string& prefix)
    : Encoder(hidden_dim) {
  require(hidden_dim % 2 == 0, "birnn encoder: hidden_dim must be even");
  const int half = hidden_dim / 2;
  wx_fwd_ = store.add(prefix + ".fwd.wx", random_init(emb_dim, half, rng));
  wh_fwd_ = store.add(prefix + ".fwd.wh", random_init(half, half, rng));
  b_fwd_ = store.add(prefix + ".fwd.bias", Matrix(1, half));
  wx_bwd_ = store.add(prefix + ".bwd.wx", random_init(emb_dim, half, rng));
  wh_bwd_ = store.add(prefix + ".bwd.wh", random_init(half, half, rng));
  b_bwd_ = store.add(prefix + ".bwd.bias", Matrix(1, half));
}

std::vector<ParamId> BiRnnEncoder::params() const {
  return {wx_fwd_, wh_fwd_, b_fwd_, wx_bwd_, wh_bwd_, b_bwd_};
}

VarId BiRnnEncoder::run_direction(Tape& tape, VarId embeddings, bool reverse, ParamId wx,
                                  ParamId wh, ParamId b) const {
  const int n = tape.val(embeddings).rows();
  const int half = hidden_dim_ / 2;
  VarId wx_v = tape.param(wx);
  VarId wh_v = tape.param(wh);
  VarId b_v = tape.param(b);
  VarId state = tape.constant(Matrix(1, half));
  std::vector<VarId> states(n);
  for (int step = 0; step < n; ++step) {
    int t = reverse ? n - 1 - step : step;
    VarId x_t = tape.slice_rows(embeddings, t, 1);
    VarId pre = tape.add(tape.matmul(x_t, wx_v), tape.matmul(state, wh_v));
    state = tape.tanh_op(tape.add(pre, b_v));
    states[t] = state;
  }
  return tape.concat_rows(states);
}

VarId BiRnnEncoder::encode(Tape& tape, VarId embeddings) const {
  require(tape.val(embeddings).rows() >= 1, "encode: empty input");
  VarId fwd = run_direction(tape, embeddings, false, wx_fwd_, wh_fwd_, b_fwd_);
  VarId bwd = run_direction(tape, embeddings, true, wx_bwd_, wh_bwd_, b_bwd_);
  return tape.concat_cols(fwd, bwd);
}

std::unique_ptr<Encoder> make_encoder(EncoderKind kind, ParamStore& store, int emb_dim,
                                      int hidden_dim, std::mt19937_64& rng,
                                      int conv_kernel_width) {
  switch (kind) {
    case EncoderKind::kLinear:
      return std::make_unique<LinearEncoder>(store, emb_dim, hidden_dim, rng);
    case EncoderKind::kConv:
      return std::make_unique<ConvEncoder>(store, emb_dim, hidden_dim, conv_kernel_width, rng);
    case EncoderKind::kBiRnn:
      return std::make_unique<BiRnnEncoder>(store, emb_dim, hidden_dim, rng);
  }
  fail("make_encoder: bad kind");
}

ParamId add_embedding_table(ParamStore& store, int vocab_size, int emb_dim,
                            std::mt19937_64& rng, const std::string& name) {
  Matrix table = random_init(vocab_size, emb_dim, rng, 0.1);
  for (int j = 0; j < emb_dim; ++j) table(0, j) = 0.0;  // padding row
  ParamId id = store.add(name, std::move(table));
  store.freeze_row0(id);
  return id;
}

void load_embedding_file(ParamStore& store, ParamId table, const Vocabulary& vocab,
                         const std::string& path) {
  std::ifstream in(path);
  require(in.good(), "cannot open embedding file '" + path + "'");
  Matrix& tab = store.value(table);
  std::string line;
  int lineno = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string token;
    ss >> token;
    if (first) {
      first = false;
      // `count dim` header: two integer fields and nothing else
      std::string second, extra;
      std::istringstream probe(line);
      std::string a;
      probe >> a >> second;
      bool ints = !a.empty() && !second.empty() &&
                  a.find_first_not_of("0123456789") == std::string::npos &&
                  second.find_first_not_of("0123456789") == std::string::npos;
      if (ints && !(probe >> extra)) continue;
    }
    int id = vocab.id_of(token);
    if (id < 2) {  // unknown to the vocabulary, skip
      continue;
    }
    for (int j = 0; j < tab.cols(); ++j) {
      double v;
      require(static_cast<bool>(ss >> v), path + ":" + std::to_string(lineno) +
                                              ": embedding row shorter than dimension");
      tab(id, j) = v;
    }
  }
}

VarId encode_description(Tape& tape, ParamId table, const Encoder& enc,
                         std::span<const int> desc_tokens) {
  require(!desc_tokens.empty(), "encode_description: empty description");
  return tape.maxpool_rows_op(enc.encode(tape, tape.embed(table, desc_tokens)));
}

VarId build_code_matrix(Tape& tape, ParamId table, const Encoder& enc,
                        const std::vector<std::vector<int>>& desc_token_ids) {
  std::vector<VarId> rows;
  rows.reserve(desc_token_ids.size());
  for (const auto& ids : desc_token_ids)
    rows.push_back(encode_description(tape, table, enc, ids));
  return tape.concat_rows(rows);
}

}  // namespace ahdd
