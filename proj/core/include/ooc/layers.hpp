#pragma once

#include <span>
#include <utility>
#include <vector>

#include "ooc/tensor.hpp"

namespace ooc {

// Parameter initialization range used everywhere; same seed gives
// bit-identical parameters.
inline constexpr double kInitRange = 0.08;

// Word embedding lookup table [|V| x d].
struct EmbeddingTable {
  Tensor table;
  std::size_t vocab_size = 0;
  std::size_t embed_dim = 0;

  EmbeddingTable() = default;
  EmbeddingTable(std::size_t vocab, std::size_t dim, Rng& rng);

  std::vector<Tensor*> params() { return {&table}; }
};

// Rows of the table selected by id; gradients flow only to looked-up rows.
Tensor embed(EmbeddingTable& table, std::span<const int> ids);

struct LstmState {
  Tensor h;
  Tensor c;
  static LstmState zero(std::size_t batch, std::size_t hidden) {
    return {Tensor::zeros(batch, hidden), Tensor::zeros(batch, hidden)};
  }
};

// Single-layer LSTM cell. Forget-gate bias starts at 1, everything else
// uniform(-0.08, 0.08).
struct LstmCell {
  std::size_t input_dim = 0;
  std::size_t hidden_dim = 0;
  // input, forget, output gates and candidate
  Tensor Wxi, Whi, bi;
  Tensor Wxf, Whf, bf;
  Tensor Wxo, Who, bo;
  Tensor Wxg, Whg, bg;

  LstmCell() = default;
  LstmCell(std::size_t in, std::size_t hid, Rng& rng);

  std::vector<Tensor*> params() {
    return {&Wxi, &Whi, &bi, &Wxf, &Whf, &bf,
            &Wxo, &Who, &bo, &Wxg, &Whg, &bg};
  }
};

// One LSTM step over a batch: x [B x in], state [B x hid]. The input state is
// never modified.
LstmState lstm_step(const LstmCell& cell, const Tensor& x, const LstmState& s);

// Folds lstm_step over a nonempty sequence; returns all h states and the
// final state.
std::pair<std::vector<Tensor>, LstmState> lstm_run(const LstmCell& cell,
                                                   std::span<const Tensor> xs,
                                                   const LstmState& s0);

// Additive attention: e_i = v . tanh(W_enc mem_i + W_dec query).
struct BahdanauAttention {
  std::size_t hidden_dim = 0;
  std::size_t attn_dim = 0;
  Tensor Wenc;  // [hidden x attn]
  Tensor Wdec;  // [hidden x attn]
  Tensor v;     // [attn x 1]

  BahdanauAttention() = default;
  BahdanauAttention(std::size_t hidden, std::size_t attn, Rng& rng);

  std::vector<Tensor*> params() { return {&Wenc, &Wdec, &v}; }
};

// memory [m x hidden], query [1 x hidden] -> (context [1 x hidden],
// weights [1 x m]). Weights sum to 1.
std::pair<Tensor, Tensor> attend(const BahdanauAttention& attn,
                                 const Tensor& memory, const Tensor& query);

// Affine output head: h [B x hidden] -> h W + b.
Tensor project(const Tensor& W, const Tensor& b, const Tensor& h);

}  // namespace ooc
