#pragma once

#include <memory>
#include <random>
#include <string>
#include <vector>

#include "ahdd/autodiff.hpp"
#include "ahdd/hierarchy.hpp"

namespace ahdd {

enum class EncoderKind { kLinear, kConv, kBiRnn };

EncoderKind encoder_kind_from_string(const std::string& s);
std::string to_string(EncoderKind k);

// Pluggable encoder: maps an N x emb embedding sequence to an N x h hidden
// matrix on the tape. One instance (one parameter set) serves medical notes,
// description documents, and per-code descriptions alike.
class Encoder {
 public:
  virtual ~Encoder() = default;
  virtual VarId encode(Tape& tape, VarId embeddings) const = 0;
  virtual std::vector<ParamId> params() const = 0;
  virtual EncoderKind kind() const = 0;
  int hidden_dim() const { return hidden_dim_; }

 protected:
  explicit Encoder(int hidden_dim) : hidden_dim_(hidden_dim) {}
  int hidden_dim_;
};

// Per-position affine projection. Small enough for exhaustive gradient checks.
class LinearEncoder : public Encoder {
 public:
  LinearEncoder(ParamStore& store, int emb_dim, int hidden_dim, std::mt19937_64& rng,
                const std::string& prefix = "encoder");
  VarId encode(Tape& tape, VarId embeddings) const override;
  std::vector<ParamId> params() const override { return {weight_, bias_}; }
  EncoderKind kind() const override { return EncoderKind::kLinear; }

 private:
  ParamId weight_;  // emb x h
  ParamId bias_;    // 1 x h
};

// One-dimensional convolution, odd kernel width, same-length zero padding.
class ConvEncoder : public Encoder {
 public:
  ConvEncoder(ParamStore& store, int emb_dim, int hidden_dim, int kernel_width,
              std::mt19937_64& rng, const std::string& prefix = "encoder");
  VarId encode(Tape& tape, VarId embeddings) const override;
  std::vector<ParamId> params() const override { return {kernel_, bias_}; }
  EncoderKind kind() const override { return EncoderKind::kConv; }
  int kernel_width() const { return width_; }

 private:
  ParamId kernel_;  // (width * emb) x h
  ParamId bias_;    // 1 x h
  int width_;
};

// Bidirectional tanh recurrence; forward and backward states concatenate to
// the hidden width, so hidden_dim must be even.
class BiRnnEncoder : public Encoder {
 public:
  BiRnnEncoder(ParamStore& store, int emb_dim, int hidden_dim, std::mt19937_64& rng,
               const std::string& prefix = "encoder");
  VarId encode(Tape& tape, VarId embeddings) const override;
  std::vector<ParamId> params() const override;
  EncoderKind kind() const override { return EncoderKind::kBiRnn; }

 private:
  VarId run_direction(Tape& tape, VarId embeddings, bool reverse, ParamId wx, ParamId wh,
                      ParamId b) const;
  ParamId wx_fwd_, wh_fwd_, b_fwd_;
  ParamId wx_bwd_, wh_bwd_, b_bwd_;
};

std::unique_ptr<Encoder> make_encoder(EncoderKind kind, ParamStore& store, int emb_dim,
                                      int hidden_dim, std::mt19937_64& rng,
                                      int conv_kernel_width = 3);

// Embedding table with the frozen all-zero padding row, plus optional loading
// of a whitespace-separated `token v1 .. vD` text file (an optional
// `count dim` header line is auto-detected).
ParamId add_embedding_table(ParamStore& store, int vocab_size, int emb_dim,
                            std::mt19937_64& rng, const std::string& name = "embeddings");
void load_embedding_file(ParamStore& store, ParamId table, const class Vocabulary& vocab,
                         const std::string& path);

// Coordinate-wise max over the encoded description rows (the code's pooled
// representation).
VarId encode_description(Tape& tape, ParamId table, const Encoder& enc,
                         std::span<const int> desc_tokens);

// Stacks encode_description rows in label_index order -> N_L x h.
VarId build_code_matrix(Tape& tape, ParamId table, const Encoder& enc,
                        const std::vector<std::vector<int>>& desc_token_ids);

}  // namespace ahdd
