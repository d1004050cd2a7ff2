#include "ooc/training.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "ooc/evaluation.hpp"

namespace ooc {

// --- optimizer ----------------------------------------------------------------

void AdamState::init(std::span<Tensor* const> params) {
  m.clear();
  v.clear();
  for (Tensor* p : params) {
    m.emplace_back(p->size(), 0.0);
    v.emplace_back(p->size(), 0.0);
  }
  t = 0;
}

void adam_step(std::span<Tensor* const> params, AdamState& state) {
  if (state.m.size() != params.size())
    throw ContractError("adam_step: state not initialized for parameter list");
  ++state.t;
  double bc1 = 1.0 - std::pow(state.cfg.beta1, state.t);
  double bc2 = 1.0 - std::pow(state.cfg.beta2, state.t);
  for (std::size_t pi = 0; pi < params.size(); ++pi) {
    Tensor* p = params[pi];
    auto& m = state.m[pi];
    auto& v = state.v[pi];
    for (std::size_t i = 0; i < p->size(); ++i) {
      double g = p->grad()[i];
      if (!std::isfinite(g))
        throw NumericError("adam_step: non-finite gradient in parameter #" +
                           std::to_string(pi) + " coord " + std::to_string(i));
      m[i] = state.cfg.beta1 * m[i] + (1.0 - state.cfg.beta1) * g;
      v[i] = state.cfg.beta2 * v[i] + (1.0 - state.cfg.beta2) * g * g;
      double mhat = m[i] / bc1;
      double vhat = v[i] / bc2;
      p->data()[i] -= state.cfg.lr * mhat / (std::sqrt(vhat) + state.cfg.eps);
    }
  }
}

void zero_grads(std::span<Tensor* const> params) {
  for (Tensor* p : params) p->zero_grad();
}

double grad_l2_norm(std::span<Tensor* const> params) {
  double sq = 0.0;
  for (Tensor* p : params)
    for (double g : p->grad()) sq += g * g;
  return std::sqrt(sq);
}

void clip_grads(std::span<Tensor* const> params, double max_norm) {
  double norm = grad_l2_norm(params);
  if (norm <= max_norm || norm == 0.0) return;
  double s = max_norm / norm;
  for (Tensor* p : params)
    for (double& g : p->grad()) g *= s;
}

// --- checkpoint io -------------------------------------------------------------

namespace {
constexpr const char kMagic[] = "OOCCKPT1\n";
}

const std::string& Checkpoint::get(const std::string& key) const {
  auto it = header.find(key);
  if (it == header.end())
    throw DataError("checkpoint missing header field: " + key);
  return it->second;
}

void Checkpoint::save(const std::filesystem::path& file) const {
  std::ofstream os(file, std::ios::binary);
  if (!os) throw DataError("cannot write " + file.string());
  os << kMagic;
  for (const auto& [k, v] : header) os << k << " = " << v << '\n';
  os << '\n';
  for (const auto& [name, rows, cols, data] : arrays) {
    os << name << ' ' << rows << ' ' << cols << '\n';
    os.write(reinterpret_cast<const char*>(data.data()),
             static_cast<std::streamsize>(data.size() * sizeof(double)));
  }
}

Checkpoint Checkpoint::load(const std::filesystem::path& file) {
  std::ifstream is(file, std::ios::binary);
  if (!is) throw DataError("cannot read checkpoint " + file.string());
  std::stringstream ss;
  ss << is.rdbuf();
  std::string buf = ss.str();
  std::size_t pos = 0;
  auto read_line = [&]() {
    auto nl = buf.find('\n', pos);
    if (nl == std::string::npos)
      throw DataError("truncated checkpoint: " + file.string());
    std::string line = buf.substr(pos, nl - pos);
    pos = nl + 1;
    return line;
  };
  if (buf.compare(0, sizeof(kMagic) - 1, kMagic) != 0)
    throw DataError("not a checkpoint file: " + file.string());
  pos = sizeof(kMagic) - 1;
  Checkpoint ckpt;
  while (true) {
    std::string line = read_line();
    if (line.empty()) break;
    auto sep = line.find(" = ");
    if (sep == std::string::npos)
      throw DataError("malformed checkpoint header line: " + line);
    ckpt.header[line.substr(0, sep)] = line.substr(sep + 3);
  }
  while (pos < buf.size()) {
    std::string line = read_line();
    std::istringstream hs(line);
    std::string name;
    std::size_t rows = 0, cols = 0;
    if (!(hs >> name >> rows >> cols))
      throw DataError("malformed array header: " + line);
    std::size_t bytes = rows * cols * sizeof(double);
    if (pos + bytes > buf.size())
      throw DataError("truncated checkpoint: " + file.string());
    std::vector<double> data(rows * cols);
    std::memcpy(data.data(), buf.data() + pos, bytes);
    pos += bytes;
    ckpt.arrays.emplace_back(std::move(name), rows, cols, std::move(data));
  }
  return ckpt;
}

namespace {

void push_array(Checkpoint& ckpt, const std::string& name, const Tensor& t) {
  ckpt.arrays.emplace_back(name, t.rows(), t.cols(), t.data());
}

const std::tuple<std::string, std::size_t, std::size_t, std::vector<double>>&
find_array(const Checkpoint& ckpt, const std::string& name) {
  for (const auto& a : ckpt.arrays)
    if (std::get<0>(a) == name) return a;
  throw DataError("checkpoint missing array: " + name);
}

void load_into(const Checkpoint& ckpt, const std::string& name, Tensor& t) {
  const auto& [nm, rows, cols, data] = find_array(ckpt, name);
  if (rows != t.rows() || cols != t.cols())
    throw DataError("checkpoint array " + name + " has shape " +
                    std::to_string(rows) + "x" + std::to_string(cols) +
                    ", expected " + std::to_string(t.rows()) + "x" +
                    std::to_string(t.cols()));
  t.data() = data;
}

void check_fingerprint(const Checkpoint& ckpt, std::uint64_t expected) {
  if (expected == 0) return;
  std::uint64_t stored = std::stoull(ckpt.get("vocab_fingerprint"));
  if (stored != expected)
    throw DataError("vocabulary fingerprint mismatch: checkpoint has " +
                    std::to_string(stored) + ", vocabulary has " +
                    std::to_string(expected));
}

}  // namespace

Checkpoint model_to_checkpoint(Model& model, const AdamState* adam, int epoch,
                               const std::string& rng_state,
                               std::uint64_t vocab_fingerprint) {
  Checkpoint ckpt;
  const ModelConfig& c = model.cfg;
  ckpt.header["kind"] = "model";
  ckpt.header["topology"] = to_string(c.topology);
  ckpt.header["sentence_repr"] = to_string(c.sentence_repr);
  ckpt.header["embed_dim"] = std::to_string(c.embed_dim);
  ckpt.header["hidden_dim"] = std::to_string(c.hidden_dim);
  ckpt.header["vocab_size"] = std::to_string(c.vocab_size);
  ckpt.header["context_window"] = std::to_string(c.context_window);
  ckpt.header["max_sentence_len"] = std::to_string(c.max_sentence_len);
  ckpt.header["seed"] = std::to_string(c.seed);
  ckpt.header["clip"] = c.clip ? "1" : "0";
  ckpt.header["epoch"] = std::to_string(epoch);
  ckpt.header["vocab_fingerprint"] = std::to_string(vocab_fingerprint);
  if (!rng_state.empty()) ckpt.header["rng_state"] = rng_state;
  auto named = model.named_params();
  for (auto& [name, tensor] : named) push_array(ckpt, name, *tensor);
  if (adam) {
    ckpt.header["adam.t"] = std::to_string(adam->t);
    ckpt.header["adam.lr"] = std::to_string(adam->cfg.lr);
    auto trainable = model.params();
    for (std::size_t i = 0; i < trainable.size(); ++i) {
      // trainable params are the leading entries of named_params
      ckpt.arrays.emplace_back("adam.m." + named[i].first,
                               trainable[i]->rows(), trainable[i]->cols(),
                               adam->m[i]);
      ckpt.arrays.emplace_back("adam.v." + named[i].first,
                               trainable[i]->rows(), trainable[i]->cols(),
                               adam->v[i]);
    }
  }
  return ckpt;
}

Model model_from_checkpoint(const Checkpoint& ckpt,
                            std::uint64_t expected_fingerprint) {
  if (ckpt.get("kind") != "model")
    throw DataError("checkpoint is not a model checkpoint");
  check_fingerprint(ckpt, expected_fingerprint);
  ModelConfig cfg;
  cfg.topology = parse_topology(ckpt.get("topology"));
  cfg.sentence_repr = parse_sent_repr(ckpt.get("sentence_repr"));
  cfg.embed_dim = std::stoull(ckpt.get("embed_dim"));
  cfg.hidden_dim = std::stoull(ckpt.get("hidden_dim"));
  cfg.vocab_size = std::stoull(ckpt.get("vocab_size"));
  cfg.context_window = std::stoull(ckpt.get("context_window"));
  cfg.max_sentence_len = std::stoull(ckpt.get("max_sentence_len"));
  cfg.seed = std::stoull(ckpt.get("seed"));
  cfg.clip = ckpt.get("clip") == "1";

  std::shared_ptr<SentenceEncoder> enc;
  if (is_contextual(cfg.topology)) {
    const auto& emb_arr = find_array(ckpt, "sentenc.emb.table");
    const auto& wxi_arr = find_array(ckpt, "sentenc.cell.Wxi");
    std::size_t enc_vocab = std::get<1>(emb_arr);
    std::size_t enc_dim = std::get<2>(emb_arr);
    std::size_t enc_hidden = std::get<2>(wxi_arr);
    Rng scratch(0);
    enc = std::make_shared<SentenceEncoder>();
    enc->emb = EmbeddingTable(enc_vocab, enc_dim, scratch);
    enc->cell = LstmCell(enc_dim, enc_hidden, scratch);
    enc->tag = cfg.sentence_repr;
    enc->vocab_fingerprint = std::stoull(ckpt.get("vocab_fingerprint"));
  }
  Model model(cfg, enc);
  for (auto& [name, tensor] : model.named_params())
    load_into(ckpt, name, *tensor);
  return model;
}

Checkpoint encoder_to_checkpoint(SentenceEncoder& enc) {
  Checkpoint ckpt;
  ckpt.header["kind"] = "sentenc";
  ckpt.header["tag"] = to_string(enc.tag);
  ckpt.header["vocab_size"] = std::to_string(enc.emb.vocab_size);
  ckpt.header["embed_dim"] = std::to_string(enc.emb.embed_dim);
  ckpt.header["hidden_dim"] = std::to_string(enc.cell.hidden_dim);
  ckpt.header["vocab_fingerprint"] = std::to_string(enc.vocab_fingerprint);
  push_array(ckpt, "emb.table", enc.emb.table);
  const char* names[] = {"Wxi", "Whi", "bi", "Wxf", "Whf", "bf",
                         "Wxo", "Who", "bo", "Wxg", "Whg", "bg"};
  auto ps = enc.cell.params();
  for (std::size_t i = 0; i < ps.size(); ++i)
    push_array(ckpt, std::string("cell.") + names[i], *ps[i]);
  return ckpt;
}

SentenceEncoder encoder_from_checkpoint(const Checkpoint& ckpt,
                                        std::uint64_t expected_fingerprint) {
  if (ckpt.get("kind") != "sentenc")
    throw DataError("checkpoint is not a sentence-encoder checkpoint");
  check_fingerprint(ckpt, expected_fingerprint);
  SentenceEncoder enc;
  Rng scratch(0);
  enc.emb = EmbeddingTable(std::stoull(ckpt.get("vocab_size")),
                           std::stoull(ckpt.get("embed_dim")), scratch);
  enc.cell = LstmCell(enc.emb.embed_dim, std::stoull(ckpt.get("hidden_dim")),
                      scratch);
  enc.tag = parse_sent_repr(ckpt.get("tag"));
  enc.vocab_fingerprint = std::stoull(ckpt.get("vocab_fingerprint"));
  load_into(ckpt, "emb.table", enc.emb.table);
  const char* names[] = {"Wxi", "Whi", "bi", "Wxf", "Whf", "bf",
                         "Wxo", "Who", "bo", "Wxg", "Whg", "bg"};
  auto ps = enc.cell.params();
  for (std::size_t i = 0; i < ps.size(); ++i)
    load_into(ckpt, std::string("cell.") + names[i], *ps[i]);
  return enc;
}

// --- batching -----------------------------------------------------------------

PaddedBatch make_padded_batch(
    std::span<const std::pair<const Document*, int>> instances,
    bool lm_framing) {
  PaddedBatch b;
  b.batch = instances.size();
  for (const auto& [doc, si] : instances)
    b.steps = std::max(b.steps, doc->sentences[si].tokens.size());
  b.inputs.assign(b.batch * b.steps, Vocabulary::kPad);
  b.targets.assign(b.batch * b.steps, Vocabulary::kPad);
  b.labels.assign(b.batch * b.steps, 0.0);
  b.mask.assign(b.batch * b.steps, 0.0);
  for (std::size_t bi = 0; bi < b.batch; ++bi) {
    const Sentence& sent = instances[bi].first->sentences[instances[bi].second];
    std::size_t n = sent.tokens.size();
    for (std::size_t t = 0; t < n; ++t) {
      const Token& tok = sent.tokens[t];
      b.inputs[bi * b.steps + t] =
          lm_framing ? (t == 0 ? Vocabulary::kBos : sent.tokens[t - 1].vocab_id)
                     : tok.vocab_id;
      b.targets[bi * b.steps + t] = tok.vocab_id;
      b.labels[bi * b.steps + t] = static_cast<double>(tok.label);
      b.mask[bi * b.steps + t] = 1.0;
    }
  }
  return b;
}

// --- training loop --------------------------------------------------------------

namespace {

struct Instance {
  std::size_t doc = 0;
  int sent = 0;
};

std::vector<Instance> collect_instances(const std::vector<Document>& docs) {
  std::vector<Instance> out;
  for (std::size_t d = 0; d < docs.size(); ++d)
    for (const Sentence& s : docs[d].sentences)
      out.push_back({d, s.index});
  return out;
}

std::vector<int> token_ids(const Sentence& s) {
  std::vector<int> ids;
  ids.reserve(s.tokens.size());
  for (const Token& t : s.tokens) ids.push_back(t.vocab_id);
  return ids;
}

// Loss over one chunk of instances; returns (loss tensor, active positions).
std::pair<Tensor, double> chunk_loss(
    Model& model, const std::vector<Document>& docs,
    std::span<const Instance> chunk,
    const std::vector<std::vector<Tensor>>& reprs) {
  Topology topo = model.cfg.topology;
  if (uses_attention(topo)) {
    Tensor total;
    double ntok = 0.0;
    for (const Instance& ins : chunk) {
      const Sentence& sent = docs[ins.doc].sentences[ins.sent];
      auto memory = context_memory(model, reprs[ins.doc], ins.sent);
      Tensor nll = attn_lm_nll_sum(model, token_ids(sent), memory);
      total = total.defined() ? add(total, nll) : nll;
      ntok += static_cast<double>(sent.tokens.size());
    }
    return {scale(total, 1.0 / ntok), ntok};
  }
  std::vector<std::pair<const Document*, int>> ptrs;
  ptrs.reserve(chunk.size());
  for (const Instance& ins : chunk) ptrs.emplace_back(&docs[ins.doc], ins.sent);
  PaddedBatch batch = make_padded_batch(ptrs, !is_supervised(topo));
  Tensor h0;
  if (is_contextual(topo)) {
    std::vector<Tensor> ctxs;
    ctxs.reserve(chunk.size());
    for (const Instance& ins : chunk)
      ctxs.push_back(encode_context(model, reprs[ins.doc], ins.sent).c);
    h0 = stack_rows(ctxs);
  }
  Tensor loss = is_supervised(topo) ? binclass_batch_loss(model, batch, h0)
                                    : lm_batch_loss(model, batch, h0);
  return {loss, batch.active()};
}

double mean_loss_no_update(Model& model, const std::vector<Document>& docs,
                           const std::vector<std::vector<Tensor>>& reprs,
                           std::size_t batch_size) {
  auto instances = collect_instances(docs);
  double total = 0.0, active = 0.0;
  for (std::size_t i = 0; i < instances.size(); i += batch_size) {
    std::size_t n = std::min(batch_size, instances.size() - i);
    auto [loss, a] =
        chunk_loss(model, docs, std::span(instances).subspan(i, n), reprs);
    total += loss.value() * a;
    active += a;
  }
  return total / active;
}

std::vector<std::vector<Tensor>> build_repr_cache(
    Model& model, const std::vector<Document>& docs) {
  std::vector<std::vector<Tensor>> reprs;
  if (!is_contextual(model.cfg.topology)) {
    reprs.resize(docs.size());
    return reprs;
  }
  reprs.reserve(docs.size());
  for (const Document& doc : docs)
    reprs.push_back(sentence_reprs(*model.sentenc, doc));
  return reprs;
}

}  // namespace

TrainResult train(Model& model, const std::vector<Document>& train_docs,
                  const std::vector<Document>& dev_docs,
                  const Vocabulary& vocab, const TrainConfig& cfg) {
  if (dev_docs.empty()) throw ContractError("train: dev set is empty");
  if (train_docs.empty()) throw ContractError("train: training set is empty");
  auto params_vec = model.params();
  std::span<Tensor* const> params(params_vec);
  AdamState adam;
  adam.cfg.lr = cfg.lr;
  adam.init(params);
  zero_grads(params);

  // H(s) comes from the frozen encoder, so one cache serves all epochs.
  auto train_reprs = build_repr_cache(model, train_docs);
  auto dev_reprs = build_repr_cache(model, dev_docs);

  auto instances = collect_instances(train_docs);
  Rng shuffle_rng = Rng(cfg.seed).child("shuffle");
  bool supervised = is_supervised(model.cfg.topology);

  TrainResult result;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    shuffle_rng.shuffle(instances);
    double loss_sum = 0.0, active_sum = 0.0;
    for (std::size_t i = 0; i < instances.size(); i += cfg.batch_size) {
      std::size_t n = std::min(cfg.batch_size, instances.size() - i);
      auto [loss, active] = chunk_loss(
          model, train_docs, std::span(instances).subspan(i, n), train_reprs);
      double lv = loss.value();
      if (!std::isfinite(lv)) {
        result.diverged = true;
        return result;
      }
      backward(loss);
      if (cfg.clip) clip_grads(params, 5.0);
      adam_step(params, adam);
      zero_grads(params);
      loss_sum += lv * active;
      active_sum += active;
    }
    double dev_metric =
        supervised ? mean_loss_no_update(model, dev_docs, dev_reprs,
                                         cfg.batch_size)
                   : perplexity(model, dev_docs);
    result.log.push_back({epoch, loss_sum / active_sum, dev_metric});
    if (result.best_epoch < 0 || dev_metric < result.best_metric) {
      result.best_epoch = epoch;
      result.best_metric = dev_metric;
      result.best = model_to_checkpoint(model, &adam, epoch,
                                        shuffle_rng.state(),
                                        vocab.fingerprint());
    }
  }
  return result;
}

void append_metrics_log(const std::filesystem::path& file,
                        std::span<const EpochMetrics> log) {
  std::ofstream os(file, std::ios::app);
  if (!os) throw DataError("cannot write " + file.string());
  os.precision(10);
  for (const EpochMetrics& m : log)
    os << m.epoch << '\t' << m.train_loss << '\t' << m.dev_metric << '\n';
}

// --- pre-trained sentence representations --------------------------------------

SentenceEncoder pretrain_sentenc_lm(const std::vector<Document>& train,
                                    const Vocabulary& vocab,
                                    const PretrainConfig& cfg,
                                    std::vector<double>* epoch_losses) {
  ModelConfig mc;
  mc.topology = Topology::BaselineLm;
  mc.embed_dim = cfg.embed_dim;
  mc.hidden_dim = cfg.hidden_dim;
  mc.vocab_size = vocab.size();
  mc.seed = cfg.seed;
  Model lm(mc, nullptr);
  auto params_vec = lm.params();
  std::span<Tensor* const> params(params_vec);
  AdamState adam;
  adam.cfg.lr = cfg.lr;
  adam.init(params);
  zero_grads(params);

  auto instances = collect_instances(train);
  std::vector<std::vector<Tensor>> no_reprs(train.size());
  Rng rng = Rng(cfg.seed).child("pretrain-lm-shuffle");
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    rng.shuffle(instances);
    double loss_sum = 0.0, active_sum = 0.0;
    for (std::size_t i = 0; i < instances.size(); i += cfg.batch_size) {
      std::size_t n = std::min(cfg.batch_size, instances.size() - i);
      auto [loss, active] =
          chunk_loss(lm, train, std::span(instances).subspan(i, n), no_reprs);
      backward(loss);
      adam_step(params, adam);
      zero_grads(params);
      loss_sum += loss.value() * active;
      active_sum += active;
    }
    if (epoch_losses) epoch_losses->push_back(loss_sum / active_sum);
  }
  SentenceEncoder enc;
  enc.emb = lm.emb;
  enc.cell = lm.decoder;
  enc.tag = SentRepr::LmCr;
  enc.vocab_fingerprint = vocab.fingerprint();
  return enc;
}

SentenceEncoder pretrain_sentenc_nmt(
    const std::vector<std::pair<Sentence, Sentence>>& pairs,
    const Vocabulary& source_vocab, const Vocabulary& target_vocab,
    const PretrainConfig& cfg, std::vector<double>* epoch_losses) {
  if (pairs.empty()) throw ContractError("pretrain_sentenc_nmt: no pairs");
  Rng init = Rng(cfg.seed).child("init-nmt");
  EmbeddingTable src_emb(source_vocab.size(), cfg.embed_dim, init);
  LstmCell src_cell(cfg.embed_dim, cfg.hidden_dim, init);
  EmbeddingTable tgt_emb(target_vocab.size(), cfg.embed_dim, init);
  LstmCell tgt_cell(cfg.embed_dim, cfg.hidden_dim, init);
  Tensor Wout = Tensor::uniform(cfg.hidden_dim, target_vocab.size(),
                                -kInitRange, kInitRange, init);
  Tensor bout = Tensor::uniform(1, target_vocab.size(), -kInitRange,
                                kInitRange, init);

  std::vector<Tensor*> params_vec = src_emb.params();
  for (Tensor* p : src_cell.params()) params_vec.push_back(p);
  for (Tensor* p : tgt_emb.params()) params_vec.push_back(p);
  for (Tensor* p : tgt_cell.params()) params_vec.push_back(p);
  params_vec.push_back(&Wout);
  params_vec.push_back(&bout);
  std::span<Tensor* const> params(params_vec);
  AdamState adam;
  adam.cfg.lr = cfg.lr;
  adam.init(params);
  zero_grads(params);

  std::vector<std::size_t> order(pairs.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng = Rng(cfg.seed).child("pretrain-nmt-shuffle");
  std::vector<double> one{1.0};
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    rng.shuffle(order);
    double loss_sum = 0.0, tok_sum = 0.0;
    for (std::size_t i = 0; i < order.size(); i += cfg.batch_size) {
      std::size_t n = std::min(cfg.batch_size, order.size() - i);
      Tensor total;
      double ntok = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        const auto& [src, tgt] = pairs[order[i + k]];
        // encoder over source tokens only
        std::vector<Tensor> xs;
        for (const Token& t : src.tokens)
          xs.push_back(embed(src_emb, std::span(&t.vocab_id, 1)));
        auto [hs, enc_state] =
            lstm_run(src_cell, xs, LstmState::zero(1, cfg.hidden_dim));
        // decoder initialized from the encoder's final state
        LstmState s = enc_state;
        for (std::size_t t = 0; t < tgt.tokens.size(); ++t) {
          int in_id =
              t == 0 ? Vocabulary::kBos : tgt.tokens[t - 1].vocab_id;
          Tensor x = embed(tgt_emb, std::span(&in_id, 1));
          s = lstm_step(tgt_cell, x, s);
          Tensor logits = project(Wout, bout, s.h);
          int target = tgt.tokens[t].vocab_id;
          Tensor nll =
              softmax_cross_entropy_wsum(logits, std::span(&target, 1), one);
          total = total.defined() ? add(total, nll) : nll;
        }
        ntok += static_cast<double>(tgt.tokens.size());
      }
      Tensor loss = scale(total, 1.0 / ntok);
      backward(loss);
      adam_step(params, adam);
      zero_grads(params);
      loss_sum += loss.value() * ntok;
      tok_sum += ntok;
    }
    if (epoch_losses) epoch_losses->push_back(loss_sum / tok_sum);
  }
  SentenceEncoder enc;
  enc.emb = src_emb;
  enc.cell = src_cell;
  enc.tag = SentRepr::NmtCr;
  enc.vocab_fingerprint = source_vocab.fingerprint();
  return enc;
}

}  // namespace ooc
