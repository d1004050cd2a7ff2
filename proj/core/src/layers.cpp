#include "ooc/layers.hpp"

#include <algorithm>

namespace ooc {

EmbeddingTable::EmbeddingTable(std::size_t vocab, std::size_t dim, Rng& rng)
    : vocab_size(vocab), embed_dim(dim) {
  table = Tensor::uniform(vocab, dim, -kInitRange, kInitRange, rng);
}

Tensor embed(EmbeddingTable& table, std::span<const int> ids) {
  std::size_t n = ids.size();
  std::size_t d = table.embed_dim;
  for (int id : ids)
    if (id < 0 || static_cast<std::size_t>(id) >= table.vocab_size)
      throw IndexError("embed: id " + std::to_string(id) +
                       " out of range [0," + std::to_string(table.vocab_size) +
                       ")");
  std::vector<int> idv(ids.begin(), ids.end());
  Tensor out = make_op(n, d, {table.table}, [n, d, idv](TensorNode& o) {
    TensorNode* pt = o.parents[0].node();
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < d; ++j)
        pt->grad[static_cast<std::size_t>(idv[i]) * d + j] +=
            o.grad[i * d + j];
  });
  for (std::size_t i = 0; i < n; ++i)
    std::copy(table.table.data().begin() + idv[i] * d,
              table.table.data().begin() + (idv[i] + 1) * d,
              out.data().begin() + i * d);
  return out;
}

LstmCell::LstmCell(std::size_t in, std::size_t hid, Rng& rng)
    : input_dim(in), hidden_dim(hid) {
  auto w_in = [&] { return Tensor::uniform(in, hid, -kInitRange, kInitRange, rng); };
  auto w_hid = [&] { return Tensor::uniform(hid, hid, -kInitRange, kInitRange, rng); };
  auto bias = [&] { return Tensor::uniform(1, hid, -kInitRange, kInitRange, rng); };
  Wxi = w_in(); Whi = w_hid(); bi = bias();
  Wxf = w_in(); Whf = w_hid(); bf = Tensor::full(1, hid, 1.0);
  Wxo = w_in(); Who = w_hid(); bo = bias();
  Wxg = w_in(); Whg = w_hid(); bg = bias();
}

LstmState lstm_step(const LstmCell& cell, const Tensor& x,
                    const LstmState& s) {
  if (x.cols() != cell.input_dim)
    throw ShapeError("lstm_step: input has " + std::to_string(x.cols()) +
                     " columns, cell expects " +
                     std::to_string(cell.input_dim));
  if (s.h.cols() != cell.hidden_dim || x.rows() != s.h.rows())
    throw ShapeError("lstm_step: state/batch shape mismatch");
  auto gate = [&](const Tensor& Wx, const Tensor& Wh, const Tensor& b) {
    return add_rowvec(add(matmul(x, Wx), matmul(s.h, Wh)), b);
  };
  Tensor i = sigmoid(gate(cell.Wxi, cell.Whi, cell.bi));
  Tensor f = sigmoid(gate(cell.Wxf, cell.Whf, cell.bf));
  Tensor o = sigmoid(gate(cell.Wxo, cell.Who, cell.bo));
  Tensor g = tanh(gate(cell.Wxg, cell.Whg, cell.bg));
  Tensor c = add(mul(f, s.c), mul(i, g));
  Tensor h = mul(o, tanh(c));
  return {h, c};
}

std::pair<std::vector<Tensor>, LstmState> lstm_run(const LstmCell& cell,
                                                   std::span<const Tensor> xs,
                                                   const LstmState& s0) {
  if (xs.empty()) throw ContractError("lstm_run: empty input sequence");
  std::vector<Tensor> hs;
  hs.reserve(xs.size());
  LstmState s = s0;
  for (const Tensor& x : xs) {
    s = lstm_step(cell, x, s);
    hs.push_back(s.h);
  }
  return {std::move(hs), std::move(s)};
}

BahdanauAttention::BahdanauAttention(std::size_t hidden, std::size_t attn,
                                     Rng& rng)
    : hidden_dim(hidden), attn_dim(attn) {
  Wenc = Tensor::uniform(hidden, attn, -kInitRange, kInitRange, rng);
  Wdec = Tensor::uniform(hidden, attn, -kInitRange, kInitRange, rng);
  v = Tensor::uniform(attn, 1, -kInitRange, kInitRange, rng);
}

std::pair<Tensor, Tensor> attend(const BahdanauAttention& attn,
                                 const Tensor& memory, const Tensor& query) {
  if (memory.rows() < 1) throw ContractError("attend: empty memory");
  if (memory.cols() != attn.hidden_dim || query.cols() != attn.hidden_dim)
    throw ShapeError("attend: memory/query width mismatch");
  Tensor proj = tanh(add_rowvec(matmul(memory, attn.Wenc),
                                matmul(query, attn.Wdec)));  // [m x a]
  Tensor scores = transpose(matmul(proj, attn.v));           // [1 x m]
  Tensor weights = softmax_rows(scores);
  Tensor context = matmul(weights, memory);  // [1 x hidden]
  return {context, weights};
}

Tensor project(const Tensor& W, const Tensor& b, const Tensor& h) {
  return add_rowvec(matmul(h, W), b);
}

}  // namespace ooc
