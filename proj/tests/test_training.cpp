#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>

#include "ooc/synth.hpp"
#include "ooc/training.hpp"

using namespace ooc;

namespace {

std::shared_ptr<SentenceEncoder> make_encoder(std::size_t vocab, std::size_t d,
                                              std::size_t h,
                                              std::uint64_t seed) {
  Rng rng(seed);
  auto enc = std::make_shared<SentenceEncoder>();
  enc->emb = EmbeddingTable(vocab, d, rng);
  enc->cell = LstmCell(d, h, rng);
  enc->tag = SentRepr::LmCr;
  return enc;
}

Model tiny_model(Topology topo, std::size_t vocab, std::uint64_t seed = 42) {
  ModelConfig cfg;
  cfg.topology = topo;
  cfg.sentence_repr = is_contextual(topo) ? SentRepr::LmCr : SentRepr::None;
  cfg.embed_dim = 8;
  cfg.hidden_dim = 16;
  cfg.vocab_size = vocab;
  cfg.seed = seed;
  auto enc =
      is_contextual(topo) ? make_encoder(vocab, 8, 12, seed + 1) : nullptr;
  return Model(cfg, enc);
}

struct Fixture {
  std::vector<Document> train, dev;
  Vocabulary vocab;
};

Fixture small_corpus() {
  synth::SynthConfig cfg;
  cfg.docs = 8;
  cfg.replacements_per_doc = 4;
  cfg.seed = 3;
  auto synth_out = synth::generate(cfg);
  Fixture fx;
  fx.train.assign(synth_out.corrupted.begin(), synth_out.corrupted.end() - 2);
  fx.dev.assign(synth_out.corrupted.end() - 2, synth_out.corrupted.end());
  fx.vocab = build_vocab(fx.train, 100);
  apply_vocab(fx.train, fx.vocab);
  apply_vocab(fx.dev, fx.vocab);
  return fx;
}

}  // namespace

TEST_CASE("adam leaves parameters alone on zero gradients") {
  Tensor x = Tensor::from(1, 2, {1.0, -2.0});
  Tensor* params[] = {&x};
  AdamState st;
  st.init(params);
  x.zero_grad();
  adam_step(params, st);
  CHECK(st.t == 1);
  CHECK(x.at(0, 0) == 1.0);
  CHECK(x.at(0, 1) == -2.0);
}

TEST_CASE("adam first step has magnitude alpha") {
  Tensor x = Tensor::from(1, 3, {1.0, 2.0, 3.0});
  Tensor* params[] = {&x};
  AdamState st;
  st.cfg.lr = 0.001;
  st.init(params);
  x.grad() = {0.5, -8.0, 100.0};
  adam_step(params, st);
  CHECK(std::abs(x.at(0, 0) - (1.0 - 0.001)) < 1e-6);
  CHECK(std::abs(x.at(0, 1) - (2.0 + 0.001)) < 1e-6);
  CHECK(std::abs(x.at(0, 2) - (3.0 - 0.001)) < 1e-6);
}

TEST_CASE("adam five-step trajectory on x squared matches the oracle") {
  // independent reimplementation of bias-corrected Adam on f(x)=x^2, x0=1
  double ox = 1.0, om = 0.0, ov = 0.0;
  const double lr = 0.001, b1 = 0.9, b2 = 0.999, eps = 1e-8;
  std::vector<double> expected;
  for (int t = 1; t <= 5; ++t) {
    double g = 2.0 * ox;
    om = b1 * om + (1 - b1) * g;
    ov = b2 * ov + (1 - b2) * g * g;
    double mhat = om / (1 - std::pow(b1, t));
    double vhat = ov / (1 - std::pow(b2, t));
    ox -= lr * mhat / (std::sqrt(vhat) + eps);
    expected.push_back(ox);
  }

  Tensor x = Tensor::scalar(1.0);
  Tensor* params[] = {&x};
  AdamState st;
  st.init(params);
  for (int t = 0; t < 5; ++t) {
    x.zero_grad();
    backward(mul(x, x));
    adam_step(params, st);
    CHECK(std::abs(x.value() - expected[t]) < 1e-12);
  }
}

TEST_CASE("adam keeps the first update direction under gradient scaling") {
  Tensor a = Tensor::from(1, 2, {1.0, 1.0});
  Tensor b = Tensor::from(1, 2, {1.0, 1.0});
  Tensor* pa[] = {&a};
  Tensor* pb[] = {&b};
  AdamState sa, sb;
  sa.init(pa);
  sb.init(pb);
  a.grad() = {0.3, -0.7};
  b.grad() = {0.3e6, -0.7e6};
  adam_step(pa, sa);
  adam_step(pb, sb);
  CHECK(std::signbit(a.at(0, 0) - 1.0) == std::signbit(b.at(0, 0) - 1.0));
  CHECK(std::abs((a.at(0, 0) - 1.0) - (b.at(0, 0) - 1.0)) < 1e-6);
}

TEST_CASE("adam aborts on non-finite gradients") {
  Tensor x = Tensor::scalar(1.0);
  Tensor* params[] = {&x};
  AdamState st;
  st.init(params);
  x.grad() = {std::numeric_limits<double>::quiet_NaN()};
  CHECK_THROWS_AS(adam_step(params, st), NumericError);
}

TEST_CASE("gradient clipping rescales to the target norm") {
  Tensor x = Tensor::from(1, 2, {0.0, 0.0});
  Tensor* params[] = {&x};
  x.grad() = {3.0, 4.0};
  CHECK(grad_l2_norm(params) == doctest::Approx(5.0));
  clip_grads(params, 1.0);
  CHECK(grad_l2_norm(params) == doctest::Approx(1.0));
  clip_grads(params, 10.0);  // already below: untouched
  CHECK(grad_l2_norm(params) == doctest::Approx(1.0));
}

TEST_CASE("padded batch mask counts active positions") {
  Document doc = tokenize("d", "a b\nc d e\nf g h i j\n");
  std::vector<std::pair<const Document*, int>> instances = {
      {&doc, 0}, {&doc, 1}, {&doc, 2}};
  PaddedBatch b = make_padded_batch(instances, true);
  CHECK(b.batch == 3);
  CHECK(b.steps == 5);
  CHECK(b.active() == 10.0);  // 2 + 3 + 5
  CHECK(b.inputs[0 * 5 + 0] == Vocabulary::kBos);
  CHECK(b.inputs[0 * 5 + 4] == Vocabulary::kPad);
}

TEST_CASE("padding does not change the loss") {
  Fixture fx = small_corpus();
  Model model = tiny_model(Topology::BaselineLm, fx.vocab.size());
  const Document& doc = fx.train[0];
  std::vector<std::pair<const Document*, int>> batched = {{&doc, 0}, {&doc, 1}};
  PaddedBatch b = make_padded_batch(batched, true);
  Tensor h0;
  double batch_loss = lm_batch_loss(model, b, h0).value() * b.active();

  double individual = 0.0;
  for (int s : {0, 1}) {
    std::vector<int> ids;
    for (const Token& t : doc.sentences[s].tokens) ids.push_back(t.vocab_id);
    for (double nll : lm_token_nll(model, ids, h0)) individual += nll;
  }
  CHECK(batch_loss == doctest::Approx(individual).epsilon(1e-9));
}

TEST_CASE("checkpoint files round trip bit-exactly") {
  Fixture fx = small_corpus();
  Model model = tiny_model(Topology::ContextLm, fx.vocab.size());
  Checkpoint ckpt =
      model_to_checkpoint(model, nullptr, 3, "", fx.vocab.fingerprint());
  auto tmp = std::filesystem::temp_directory_path() / "ooc_ckpt_test.bin";
  ckpt.save(tmp);
  Checkpoint loaded = Checkpoint::load(tmp);
  CHECK(loaded.header == ckpt.header);
  REQUIRE(loaded.arrays.size() == ckpt.arrays.size());
  for (std::size_t i = 0; i < ckpt.arrays.size(); ++i)
    CHECK(loaded.arrays[i] == ckpt.arrays[i]);

  Model rebuilt = model_from_checkpoint(loaded, fx.vocab.fingerprint());
  CHECK(rebuilt.emb.table.data() == model.emb.table.data());
  CHECK(rebuilt.context_cell.Whg.data() == model.context_cell.Whg.data());
  CHECK(rebuilt.sentenc->cell.Wxf.data() == model.sentenc->cell.Wxf.data());

  // wrong vocabulary fingerprint
  CHECK_THROWS_AS(model_from_checkpoint(loaded, fx.vocab.fingerprint() + 1),
                  DataError);

  // truncated file
  auto size = std::filesystem::file_size(tmp);
  std::filesystem::resize_file(tmp, size - 37);
  CHECK_THROWS_AS(Checkpoint::load(tmp), DataError);
  std::filesystem::remove(tmp);
}

TEST_CASE("encoder checkpoints round trip") {
  auto enc = make_encoder(30, 6, 10, 5);
  enc->vocab_fingerprint = 999;
  Checkpoint ckpt = encoder_to_checkpoint(*enc);
  auto tmp = std::filesystem::temp_directory_path() / "ooc_enc_test.bin";
  ckpt.save(tmp);
  SentenceEncoder back = encoder_from_checkpoint(Checkpoint::load(tmp), 999);
  CHECK(back.emb.table.data() == enc->emb.table.data());
  CHECK(back.cell.bf.data() == enc->cell.bf.data());
  CHECK(back.tag == enc->tag);
  CHECK_THROWS_AS(encoder_from_checkpoint(Checkpoint::load(tmp), 1000),
                  DataError);
  std::filesystem::remove(tmp);
}

TEST_CASE("training is deterministic and reduces the loss") {
  Fixture fx = small_corpus();
  TrainConfig cfg;
  cfg.epochs = 2;
  cfg.batch_size = 16;
  cfg.lr = 0.01;
  cfg.seed = 9;

  Model m1 = tiny_model(Topology::BaselineLm, fx.vocab.size());
  Model m2 = tiny_model(Topology::BaselineLm, fx.vocab.size());
  TrainResult r1 = train(m1, fx.train, fx.dev, fx.vocab, cfg);
  TrainResult r2 = train(m2, fx.train, fx.dev, fx.vocab, cfg);
  REQUIRE(r1.log.size() == 2);
  CHECK(r1.log.back().train_loss < r1.log.front().train_loss);
  CHECK(r1.best_epoch == r2.best_epoch);
  REQUIRE(r1.best.arrays.size() == r2.best.arrays.size());
  for (std::size_t i = 0; i < r1.best.arrays.size(); ++i)
    CHECK(r1.best.arrays[i] == r2.best.arrays[i]);

  CHECK_THROWS_AS(train(m1, fx.train, {}, fx.vocab, cfg), ContractError);
}

TEST_CASE("every topology improves within a few epochs") {
  Fixture fx = small_corpus();
  TrainConfig cfg;
  cfg.epochs = 3;
  cfg.batch_size = 16;
  cfg.lr = 0.01;
  cfg.seed = 1;
  for (Topology topo : {Topology::BaselineLm, Topology::BaselineBinclass,
                        Topology::ContextLm, Topology::ContextAttnLm,
                        Topology::ContextBinclass}) {
    CAPTURE(to_string(topo));
    Model model = tiny_model(topo, fx.vocab.size());
    std::vector<double> frozen_before;
    if (model.sentenc) frozen_before = model.sentenc->emb.table.data();
    TrainResult r = train(model, fx.train, fx.dev, fx.vocab, cfg);
    CHECK(!r.diverged);
    CHECK(r.log.back().train_loss < r.log.front().train_loss);
    if (model.sentenc)  // the sentence encoder stays frozen
      CHECK(model.sentenc->emb.table.data() == frozen_before);
  }
}

TEST_CASE("metrics log is tab separated") {
  std::vector<EpochMetrics> log = {{0, 1.5, 2.5}, {1, 1.25, 2.0}};
  auto tmp = std::filesystem::temp_directory_path() / "ooc_metrics_test.tsv";
  std::filesystem::remove(tmp);
  append_metrics_log(tmp, log);
  std::ifstream is(tmp);
  std::string line;
  std::getline(is, line);
  CHECK(line == "0\t1.5\t2.5");
  std::getline(is, line);
  CHECK(line == "1\t1.25\t2");
  std::filesystem::remove(tmp);
}
