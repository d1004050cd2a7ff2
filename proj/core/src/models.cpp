#include "ooc/models.hpp"

#include <algorithm>
#include <cmath>

namespace ooc {

std::string to_string(Topology t) {
  switch (t) {
    case Topology::BaselineLm: return "baseline-lm";
    case Topology::BaselineBinclass: return "baseline-binclass";
    case Topology::ContextLm: return "context-lm";
    case Topology::ContextAttnLm: return "context-attn-lm";
    case Topology::ContextBinclass: return "context-binclass";
  }
  return "?";
}

std::string to_string(SentRepr r) {
  switch (r) {
    case SentRepr::None: return "none";
    case SentRepr::LmCr: return "lm-cr";
    case SentRepr::NmtCr: return "nmt-cr";
  }
  return "?";
}

Topology parse_topology(const std::string& s) {
  for (Topology t : {Topology::BaselineLm, Topology::BaselineBinclass,
                     Topology::ContextLm, Topology::ContextAttnLm,
                     Topology::ContextBinclass})
    if (to_string(t) == s) return t;
  throw ContractError("unknown topology: " + s);
}

SentRepr parse_sent_repr(const std::string& s) {
  for (SentRepr r : {SentRepr::None, SentRepr::LmCr, SentRepr::NmtCr})
    if (to_string(r) == s) return r;
  throw ContractError("unknown sentence representation: " + s);
}

void ModelConfig::validate() const {
  if (vocab_size < Vocabulary::kReserved + 1)
    throw ContractError("ModelConfig: vocab_size too small");
  if (context_window < 1)
    throw ContractError("ModelConfig: context_window must be >= 1");
  if (is_contextual(topology) && sentence_repr == SentRepr::None)
    throw ContractError(
        "ModelConfig: contextual topologies need a sentence representation");
  if (!is_contextual(topology) && sentence_repr != SentRepr::None)
    throw ContractError("ModelConfig: baselines take sentence_repr=none");
}

Tensor encode_sentence(SentenceEncoder& enc, std::span<const int> ids) {
  if (ids.empty()) throw ContractError("encode_sentence: empty sentence");
  std::vector<Tensor> xs;
  xs.reserve(ids.size());
  for (int id : ids) xs.push_back(embed(enc.emb, std::span(&id, 1)));
  auto [hs, fin] = lstm_run(enc.cell, xs, LstmState::zero(1, enc.hidden()));
  return fin.h;
}

std::vector<Tensor> sentence_reprs(SentenceEncoder& enc, const Document& doc) {
  std::vector<Tensor> out;
  out.reserve(doc.sentences.size());
  for (const Sentence& s : doc.sentences) {
    std::vector<int> ids;
    ids.reserve(s.tokens.size());
    for (const Token& t : s.tokens) ids.push_back(t.vocab_id);
    out.push_back(encode_sentence(enc, ids).detached());
  }
  return out;
}

Model::Model(ModelConfig config, std::shared_ptr<SentenceEncoder> encoder)
    : cfg(config), sentenc(std::move(encoder)) {
  cfg.validate();
  if (is_contextual(cfg.topology) && !sentenc)
    throw ContractError("Model: contextual topology without sentence encoder");
  Rng rng = Rng(cfg.seed).child("init");
  emb = EmbeddingTable(cfg.vocab_size, cfg.embed_dim, rng);
  std::size_t dec_in = uses_attention(cfg.topology)
                           ? cfg.embed_dim + cfg.hidden_dim
                           : cfg.embed_dim;
  decoder = LstmCell(dec_in, cfg.hidden_dim, rng);
  std::size_t out_dim = is_supervised(cfg.topology) ? 1 : cfg.vocab_size;
  Wout = Tensor::uniform(cfg.hidden_dim, out_dim, -kInitRange, kInitRange, rng);
  bout = Tensor::uniform(1, out_dim, -kInitRange, kInitRange, rng);
  if (is_contextual(cfg.topology)) {
    context_cell = LstmCell(sentenc->hidden(), cfg.hidden_dim, rng);
    if (uses_attention(cfg.topology))
      attn = BahdanauAttention(cfg.hidden_dim, cfg.hidden_dim, rng);
  }
}

std::vector<Tensor*> Model::params() {
  std::vector<Tensor*> out = emb.params();
  for (Tensor* p : decoder.params()) out.push_back(p);
  out.push_back(&Wout);
  out.push_back(&bout);
  if (is_contextual(cfg.topology)) {
    for (Tensor* p : context_cell.params()) out.push_back(p);
    if (uses_attention(cfg.topology))
      for (Tensor* p : attn.params()) out.push_back(p);
  }
  return out;
}

namespace {

const char* kLstmNames[] = {"Wxi", "Whi", "bi", "Wxf", "Whf", "bf",
                            "Wxo", "Who", "bo", "Wxg", "Whg", "bg"};

void add_cell(std::vector<std::pair<std::string, Tensor*>>& out,
              const std::string& prefix, LstmCell& cell) {
  auto ps = cell.params();
  for (std::size_t i = 0; i < ps.size(); ++i)
    out.emplace_back(prefix + "." + kLstmNames[i], ps[i]);
}

}  // namespace

std::vector<std::pair<std::string, Tensor*>> Model::named_params() {
  std::vector<std::pair<std::string, Tensor*>> out;
  out.emplace_back("emb.table", &emb.table);
  add_cell(out, "decoder", decoder);
  out.emplace_back("head.W", &Wout);
  out.emplace_back("head.b", &bout);
  if (is_contextual(cfg.topology)) {
    add_cell(out, "context", context_cell);
    if (uses_attention(cfg.topology)) {
      out.emplace_back("attn.Wenc", &attn.Wenc);
      out.emplace_back("attn.Wdec", &attn.Wdec);
      out.emplace_back("attn.v", &attn.v);
    }
    out.emplace_back("sentenc.emb.table", &sentenc->emb.table);
    add_cell(out, "sentenc.cell", sentenc->cell);
  }
  return out;
}

ContextVector encode_context(const Model& model,
                             std::span<const Tensor> reprs, int j) {
  if (j < 0 || static_cast<std::size_t>(j) > reprs.size())
    throw IndexError("encode_context: sentence index " + std::to_string(j) +
                     " out of range");
  int p = static_cast<int>(model.cfg.context_window);
  int lo = std::max(0, j - p);
  ContextVector cv;
  cv.first = lo;
  cv.count = j - lo;
  if (cv.count == 0) {
    cv.c = Tensor::zeros(1, model.cfg.hidden_dim);
    return cv;
  }
  LstmState s = LstmState::zero(1, model.cfg.hidden_dim);
  for (int k = lo; k < j; ++k) s = lstm_step(model.context_cell, reprs[k], s);
  cv.c = s.h;
  return cv;
}

std::vector<Tensor> context_memory(const Model& model,
                                   std::span<const Tensor> reprs, int j) {
  int p = static_cast<int>(model.cfg.context_window);
  int lo = std::max(0, j - p);
  if (j - lo == 0) return {Tensor::zeros(1, model.cfg.hidden_dim)};
  LstmState s = LstmState::zero(1, model.cfg.hidden_dim);
  std::vector<Tensor> mem;
  for (int k = lo; k < j; ++k) {
    s = lstm_step(model.context_cell, reprs[k], s);
    mem.push_back(s.h);
  }
  return mem;
}

double PaddedBatch::active() const {
  double a = 0.0;
  for (double w : mask) a += w;
  return a;
}

namespace {

std::vector<int> column_ids(const std::vector<int>& flat, std::size_t batch,
                            std::size_t steps, std::size_t t) {
  std::vector<int> out(batch);
  for (std::size_t b = 0; b < batch; ++b) out[b] = flat[b * steps + t];
  return out;
}

std::vector<double> column_vals(const std::vector<double>& flat,
                                std::size_t batch, std::size_t steps,
                                std::size_t t) {
  std::vector<double> out(batch);
  for (std::size_t b = 0; b < batch; ++b) out[b] = flat[b * steps + t];
  return out;
}

Tensor accumulate(Tensor total, Tensor term) {
  return total.defined() ? add(total, term) : term;
}

}  // namespace

Tensor lm_batch_loss(Model& model, const PaddedBatch& b, const Tensor& h0) {
  std::size_t H = model.cfg.hidden_dim;
  LstmState s{h0.defined() ? h0 : Tensor::zeros(b.batch, H),
              Tensor::zeros(b.batch, H)};
  Tensor total;
  for (std::size_t t = 0; t < b.steps; ++t) {
    auto in = column_ids(b.inputs, b.batch, b.steps, t);
    auto tgt = column_ids(b.targets, b.batch, b.steps, t);
    auto w = column_vals(b.mask, b.batch, b.steps, t);
    Tensor x = embed(model.emb, in);
    s = lstm_step(model.decoder, x, s);
    Tensor logits = project(model.Wout, model.bout, s.h);
    total = accumulate(total, softmax_cross_entropy_wsum(logits, tgt, w));
  }
  return scale(total, 1.0 / b.active());
}

Tensor binclass_batch_loss(Model& model, const PaddedBatch& b,
                           const Tensor& h0) {
  std::size_t H = model.cfg.hidden_dim;
  LstmState s{h0.defined() ? h0 : Tensor::zeros(b.batch, H),
              Tensor::zeros(b.batch, H)};
  Tensor total;
  for (std::size_t t = 0; t < b.steps; ++t) {
    auto in = column_ids(b.inputs, b.batch, b.steps, t);
    auto y = column_vals(b.labels, b.batch, b.steps, t);
    auto w = column_vals(b.mask, b.batch, b.steps, t);
    Tensor x = embed(model.emb, in);
    s = lstm_step(model.decoder, x, s);
    Tensor logits = project(model.Wout, model.bout, s.h);
    total = accumulate(total, bce_with_logits_wsum(logits, y, w));
  }
  return scale(total, 1.0 / b.active());
}

Tensor attn_lm_nll_sum(Model& model, std::span<const int> token_ids,
                       std::span<const Tensor> memory) {
  if (token_ids.empty()) throw ContractError("attn_lm: empty sentence");
  Tensor mem = stack_rows(memory);
  LstmState s = LstmState::zero(1, model.cfg.hidden_dim);
  Tensor total;
  std::vector<double> one{1.0};
  for (std::size_t t = 0; t < token_ids.size(); ++t) {
    int in_id = t == 0 ? Vocabulary::kBos : token_ids[t - 1];
    Tensor x = embed(model.emb, std::span(&in_id, 1));
    auto [ctx, wts] = attend(model.attn, mem, s.h);
    s = lstm_step(model.decoder, concat_cols(x, ctx), s);
    Tensor logits = project(model.Wout, model.bout, s.h);
    int tgt = token_ids[t];
    total = accumulate(
        total, softmax_cross_entropy_wsum(logits, std::span(&tgt, 1), one));
  }
  return total;
}

std::vector<double> lm_token_nll(Model& model, std::span<const int> token_ids,
                                 const Tensor& h0) {
  if (token_ids.empty()) throw ContractError("lm_token_nll: empty sentence");
  std::size_t H = model.cfg.hidden_dim;
  LstmState s{h0.defined() ? h0 : Tensor::zeros(1, H), Tensor::zeros(1, H)};
  std::vector<double> out;
  out.reserve(token_ids.size());
  for (std::size_t t = 0; t < token_ids.size(); ++t) {
    int in_id = t == 0 ? Vocabulary::kBos : token_ids[t - 1];
    Tensor x = embed(model.emb, std::span(&in_id, 1));
    s = lstm_step(model.decoder, x, s);
    Tensor logits = project(model.Wout, model.bout, s.h);
    int tgt = token_ids[t];
    out.push_back(row_nll(logits, std::span(&tgt, 1))[0]);
  }
  return out;
}

std::vector<double> attn_lm_token_nll(Model& model,
                                      std::span<const int> token_ids,
                                      std::span<const Tensor> memory) {
  if (token_ids.empty()) throw ContractError("attn_lm: empty sentence");
  Tensor mem = stack_rows(memory);
  LstmState s = LstmState::zero(1, model.cfg.hidden_dim);
  std::vector<double> out;
  for (std::size_t t = 0; t < token_ids.size(); ++t) {
    int in_id = t == 0 ? Vocabulary::kBos : token_ids[t - 1];
    Tensor x = embed(model.emb, std::span(&in_id, 1));
    auto [ctx, wts] = attend(model.attn, mem, s.h);
    s = lstm_step(model.decoder, concat_cols(x, ctx), s);
    Tensor logits = project(model.Wout, model.bout, s.h);
    int tgt = token_ids[t];
    out.push_back(row_nll(logits, std::span(&tgt, 1))[0]);
  }
  return out;
}

std::vector<double> binclass_token_prob(Model& model,
                                        std::span<const int> token_ids,
                                        const Tensor& h0) {
  if (token_ids.empty())
    throw ContractError("binclass_token_prob: empty sentence");
  std::size_t H = model.cfg.hidden_dim;
  LstmState s{h0.defined() ? h0 : Tensor::zeros(1, H), Tensor::zeros(1, H)};
  std::vector<double> out;
  out.reserve(token_ids.size());
  for (int id : token_ids) {
    Tensor x = embed(model.emb, std::span(&id, 1));
    s = lstm_step(model.decoder, x, s);
    Tensor logits = project(model.Wout, model.bout, s.h);
    double z = logits.data()[0];
    out.push_back(z >= 0.0 ? 1.0 / (1.0 + std::exp(-z))
                           : std::exp(z) / (1.0 + std::exp(z)));
  }
  return out;
}

}  // namespace ooc
