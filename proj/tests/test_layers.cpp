#include <doctest.h>

#include <cmath>

#include "ooc/layers.hpp"

using namespace ooc;

namespace {

void zero_params(std::vector<Tensor*> params) {
  for (Tensor* p : params) std::fill(p->data().begin(), p->data().end(), 0.0);
}

}  // namespace

TEST_CASE("embed selects basis rows") {
  Rng rng(1);
  EmbeddingTable table(3, 3, rng);
  zero_params(table.params());
  table.table.at(0, 0) = 1;
  table.table.at(1, 1) = 1;
  table.table.at(2, 2) = 1;
  int id = 2;
  Tensor row = embed(table, std::span(&id, 1));
  CHECK(row.at(0, 0) == 0);
  CHECK(row.at(0, 1) == 0);
  CHECK(row.at(0, 2) == 1);
}

TEST_CASE("embed accumulates gradient on repeated rows") {
  Rng rng(2);
  EmbeddingTable table(4, 3, rng);
  std::vector<int> ids = {1, 1};
  Tensor out = embed(table, ids);
  CHECK(out.rows() == 2);
  backward(sum(out));
  for (std::size_t j = 0; j < 3; ++j) {
    CHECK(table.table.grad()[1 * 3 + j] == 2.0);
    CHECK(table.table.grad()[0 * 3 + j] == 0.0);  // never looked up
    CHECK(table.table.grad()[2 * 3 + j] == 0.0);
    CHECK(table.table.grad()[3 * 3 + j] == 0.0);
  }
}

TEST_CASE("embed rejects out-of-range ids") {
  Rng rng(3);
  EmbeddingTable table(4, 2, rng);
  int id = 4;
  CHECK_THROWS_AS(embed(table, std::span(&id, 1)), IndexError);
}

TEST_CASE("embed gradient check on looked-up rows") {
  Rng rng(4);
  EmbeddingTable table(5, 3, rng);
  std::vector<int> ids = {0, 3, 3};
  Tensor* params[] = {&table.table};
  auto report =
      grad_check([&] { return sum(tanh(embed(table, ids))); }, params);
  CHECK(report.pass(1e-6));
}

TEST_CASE("lstm_step analytic zero cases") {
  Rng rng(5);
  LstmCell cell(2, 3, rng);
  zero_params(cell.params());
  Tensor x = Tensor::zeros(1, 2);

  LstmState s0 = LstmState::zero(1, 3);
  LstmState s1 = lstm_step(cell, x, s0);
  for (double v : s1.h.data()) CHECK(v == doctest::Approx(0.0));
  for (double v : s1.c.data()) CHECK(v == doctest::Approx(0.0));

  // zero weights, zero biases, nonzero cell state: gates are 0.5
  LstmState s2 = LstmState::zero(1, 3);
  s2.c.at(0, 1) = 0.8;
  LstmState s3 = lstm_step(cell, x, s2);
  CHECK(s3.c.at(0, 1) == doctest::Approx(0.4));
  CHECK(s3.h.at(0, 1) == doctest::Approx(0.5 * std::tanh(0.4)));
  // input state untouched
  CHECK(s2.c.at(0, 1) == 0.8);
}

TEST_CASE("lstm_step full parameter gradient check") {
  Rng rng(6);
  LstmCell cell(3, 4, rng);
  Tensor x = Tensor::uniform(2, 3, -1, 1, rng);
  auto params = cell.params();
  auto report = grad_check(
      [&] {
        LstmState s = lstm_step(cell, x, LstmState::zero(2, 4));
        return add(sum(s.h), sum(s.c));
      },
      params);
  CHECK(report.pass(1e-4));
}

TEST_CASE("lstm_run equals manual stepping") {
  Rng rng(7);
  LstmCell cell(2, 3, rng);
  std::vector<Tensor> xs;
  for (int i = 0; i < 4; ++i) xs.push_back(Tensor::uniform(1, 2, -1, 1, rng));

  auto [hs, fin] = lstm_run(cell, xs, LstmState::zero(1, 3));
  CHECK(hs.size() == 4);
  LstmState s = LstmState::zero(1, 3);
  for (const Tensor& x : xs) s = lstm_step(cell, x, s);
  CHECK(fin.h.data() == s.h.data());
  CHECK(fin.c.data() == s.c.data());

  // length-1 run is exactly one step
  auto [h1, f1] = lstm_run(cell, std::span(xs.data(), 1), LstmState::zero(1, 3));
  LstmState one = lstm_step(cell, xs[0], LstmState::zero(1, 3));
  CHECK(f1.h.data() == one.h.data());
}

TEST_CASE("lstm_run rejects empty sequences and is pure") {
  Rng rng(8);
  LstmCell cell(2, 3, rng);
  std::vector<Tensor> empty;
  CHECK_THROWS_AS(lstm_run(cell, empty, LstmState::zero(1, 3)), ContractError);

  std::vector<Tensor> xs = {Tensor::uniform(1, 2, -1, 1, rng)};
  auto a = lstm_run(cell, xs, LstmState::zero(1, 3));
  auto b = lstm_run(cell, xs, LstmState::zero(1, 3));
  CHECK(a.second.h.data() == b.second.h.data());
}

TEST_CASE("lstm 5-step unroll gradient check") {
  Rng rng(9);
  LstmCell cell(2, 3, rng);
  std::vector<Tensor> xs;
  for (int i = 0; i < 5; ++i) xs.push_back(Tensor::uniform(1, 2, -1, 1, rng));
  auto params = cell.params();
  auto report = grad_check(
      [&] { return sum(lstm_run(cell, xs, LstmState::zero(1, 3)).second.h); },
      params);
  CHECK(report.pass(1e-4));
}

TEST_CASE("attention singleton memory") {
  Rng rng(10);
  BahdanauAttention attn(3, 3, rng);
  Tensor memory = Tensor::uniform(1, 3, -1, 1, rng);
  Tensor query = Tensor::uniform(1, 3, -1, 1, rng);
  auto [context, weights] = attend(attn, memory, query);
  CHECK(weights.at(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
  for (std::size_t j = 0; j < 3; ++j)
    CHECK(context.at(0, j) == doctest::Approx(memory.at(0, j)));
}

TEST_CASE("attention splits evenly over identical rows") {
  Rng rng(11);
  BahdanauAttention attn(3, 3, rng);
  Tensor row = Tensor::uniform(1, 3, -1, 1, rng);
  Tensor memory = Tensor::from(2, 3, {row.at(0, 0), row.at(0, 1), row.at(0, 2),
                                      row.at(0, 0), row.at(0, 1), row.at(0, 2)});
  Tensor query = Tensor::uniform(1, 3, -1, 1, rng);
  auto [context, weights] = attend(attn, memory, query);
  CHECK(weights.at(0, 0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(weights.at(0, 1) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("attention weights are a distribution") {
  Rng rng(12);
  BahdanauAttention attn(4, 4, rng);
  Tensor memory = Tensor::uniform(6, 4, -2, 2, rng);
  Tensor query = Tensor::uniform(1, 4, -2, 2, rng);
  auto [context, weights] = attend(attn, memory, query);
  double total = 0;
  for (double w : weights.data()) {
    CHECK(w >= 0.0);
    total += w;
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
  CHECK_THROWS_AS(attend(attn, Tensor::zeros(0, 4), query), ContractError);
}

TEST_CASE("attention gradient check") {
  Rng rng(13);
  BahdanauAttention attn(3, 3, rng);
  Tensor memory = Tensor::uniform(4, 3, -1, 1, rng);
  Tensor query = Tensor::uniform(1, 3, -1, 1, rng);
  std::vector<Tensor*> params = attn.params();
  params.push_back(&memory);
  params.push_back(&query);
  auto report = grad_check(
      [&] { return sum(attend(attn, memory, query).first); }, params);
  CHECK(report.pass(1e-4));
}

TEST_CASE("project affine head") {
  Rng rng(14);
  Tensor W = Tensor::zeros(3, 2);
  Tensor b = Tensor::zeros(1, 2);
  Tensor h = Tensor::uniform(2, 3, -1, 1, rng);
  Tensor logits = project(W, b, h);
  for (double v : logits.data()) CHECK(v == 0.0);

  Tensor* params[] = {&W, &b};
  W = Tensor::uniform(3, 2, -1, 1, rng);
  b = Tensor::uniform(1, 2, -1, 1, rng);
  auto report = grad_check([&] { return sum(project(W, b, h)); }, params);
  CHECK(report.pass(1e-6));
}

TEST_CASE("initialization is seeded and forget bias starts at one") {
  Rng r1(99), r2(99);
  LstmCell a(3, 4, r1), b(3, 4, r2);
  CHECK(a.Wxi.data() == b.Wxi.data());
  CHECK(a.Whg.data() == b.Whg.data());
  for (double v : a.bf.data()) CHECK(v == 1.0);
  for (double v : a.Wxo.data()) {
    CHECK(v >= -0.08);
    CHECK(v <= 0.08);
  }
}
