#pragma once

#include <memory>
#include <string>
#include <vector>

#include "ooc/corpus.hpp"
#include "ooc/layers.hpp"

namespace ooc {

enum class Topology {
  BaselineLm,
  BaselineBinclass,
  ContextLm,
  ContextAttnLm,
  ContextBinclass,
};

enum class SentRepr { None, LmCr, NmtCr };

std::string to_string(Topology t);
std::string to_string(SentRepr r);
Topology parse_topology(const std::string& s);
SentRepr parse_sent_repr(const std::string& s);

inline bool is_contextual(Topology t) {
  return t == Topology::ContextLm || t == Topology::ContextAttnLm ||
         t == Topology::ContextBinclass;
}
inline bool is_supervised(Topology t) {
  return t == Topology::BaselineBinclass || t == Topology::ContextBinclass;
}
inline bool uses_attention(Topology t) { return t == Topology::ContextAttnLm; }

struct ModelConfig {
  Topology topology = Topology::BaselineLm;
  SentRepr sentence_repr = SentRepr::None;
  std::size_t embed_dim = 64;
  std::size_t hidden_dim = 512;
  std::size_t vocab_size = 0;  // total, reserved symbols included
  std::size_t context_window = 10;  // p
  std::size_t max_sentence_len = 50;
  std::uint64_t seed = 0;
  bool clip = false;  // L2 gradient clipping at norm 5

  void validate() const;
};

// Frozen embedding + LSTM from a pre-training run. Produces H(s): the final
// hidden state over a sentence's word embeddings.
struct SentenceEncoder {
  EmbeddingTable emb;
  LstmCell cell;
  SentRepr tag = SentRepr::LmCr;
  std::uint64_t vocab_fingerprint = 0;

  std::size_t hidden() const { return cell.hidden_dim; }
  std::vector<Tensor*> params() {
    auto out = emb.params();
    for (Tensor* p : cell.params()) out.push_back(p);
    return out;
  }
};

Tensor encode_sentence(SentenceEncoder& enc, std::span<const int> ids);

// Detached H(s_j) for every sentence of a document; cached by callers since
// the encoder is frozen.
std::vector<Tensor> sentence_reprs(SentenceEncoder& enc, const Document& doc);

struct ContextVector {
  Tensor c;       // [1 x hidden]; zero for the first sentence
  int first = 0;  // window coverage [first, first+count)
  int count = 0;
};

// One of the five evaluated topologies. Baselines are the decoder alone;
// contextual variants add a trainable context-level LSTM over frozen H(s).
struct Model {
  ModelConfig cfg;
  EmbeddingTable emb;   // decoder embeddings
  LstmCell decoder;
  Tensor Wout, bout;    // [hidden x V] or [hidden x 1] head
  LstmCell context_cell;
  BahdanauAttention attn;
  std::shared_ptr<SentenceEncoder> sentenc;  // frozen, not in params()

  Model() = default;
  Model(ModelConfig config, std::shared_ptr<SentenceEncoder> encoder);

  std::vector<Tensor*> params();  // trainable only
  // stable (name, tensor) listing for checkpoints, frozen encoder included
  std::vector<std::pair<std::string, Tensor*>> named_params();
};

// Context-level LSTM over H(s) of sentences max(0, j-p)..j-1; zero vector
// for j = 0. Differentiable through the context cell.
ContextVector encode_context(const Model& model,
                             std::span<const Tensor> reprs, int j);

// Per-step context-LSTM states over the same window; a single zero row when
// the window is empty. Attention memory.
std::vector<Tensor> context_memory(const Model& model,
                                   std::span<const Tensor> reprs, int j);

// --- forward passes ----------------------------------------------------------

// Padded batch over sentence instances. Mask covers token positions; padded
// positions contribute zero loss.
struct PaddedBatch {
  std::size_t batch = 0;
  std::size_t steps = 0;               // max token count in the batch
  std::vector<int> inputs;             // [batch x steps] decoder inputs
  std::vector<int> targets;            // [batch x steps] next-word targets
  std::vector<double> labels;          // [batch x steps] binary labels
  std::vector<double> mask;            // [batch x steps]

  double active() const;
};

// Mean masked cross-entropy of next-word prediction. h0 undefined means zero
// initial state (baseline); contextual callers pass stacked context vectors.
Tensor lm_batch_loss(Model& model, const PaddedBatch& b, const Tensor& h0);

// Mean masked binary cross-entropy of per-token out-of-context logits.
Tensor binclass_batch_loss(Model& model, const PaddedBatch& b,
                           const Tensor& h0);

// Attention decoder over one sentence; returns the summed NLL (token count
// divides at the batch level).
Tensor attn_lm_nll_sum(Model& model, std::span<const int> token_ids,
                       std::span<const Tensor> memory);

// --- scoring (values only, no backward) ---------------------------------------

// -log P(w_t | w_<t, C) for each token. h0 undefined = zero state.
std::vector<double> lm_token_nll(Model& model, std::span<const int> token_ids,
                                 const Tensor& h0);

std::vector<double> attn_lm_token_nll(Model& model,
                                      std::span<const int> token_ids,
                                      std::span<const Tensor> memory);

// P(out-of-context) per token.
std::vector<double> binclass_token_prob(Model& model,
                                        std::span<const int> token_ids,
                                        const Tensor& h0);

// --- pre-trained sentence representations --------------------------------------

struct PretrainConfig {
  std::size_t embed_dim = 64;
  std::size_t hidden_dim = 512;
  int epochs = 5;
  std::size_t batch_size = 100;
  double lr = 0.001;
  std::uint64_t seed = 0;
};

// Plain sentence-level LSTM language model; its embedding + LSTM become the
// frozen LM-CR encoder.
SentenceEncoder pretrain_sentenc_lm(const std::vector<Document>& train,
                                    const Vocabulary& vocab,
                                    const PretrainConfig& cfg,
                                    std::vector<double>* epoch_losses = nullptr);

// Sequence-to-sequence translation model; the source-side encoder becomes
// the frozen NMT-CR encoder.
SentenceEncoder pretrain_sentenc_nmt(
    const std::vector<std::pair<Sentence, Sentence>>& pairs,
    const Vocabulary& source_vocab, const Vocabulary& target_vocab,
    const PretrainConfig& cfg, std::vector<double>* epoch_losses = nullptr);

}  // namespace ooc
