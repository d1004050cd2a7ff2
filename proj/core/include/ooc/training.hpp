#pragma once

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "ooc/models.hpp"

namespace ooc {

// --- optimizer ----------------------------------------------------------------

struct AdamConfig {
  double lr = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamState {
  AdamConfig cfg;
  std::vector<std::vector<double>> m, v;  // aligned with the parameter list
  long t = 0;

  void init(std::span<Tensor* const> params);
};

// Bias-corrected Adam update from the gradients currently in params.
// Non-finite gradients abort with the offending parameter index.
void adam_step(std::span<Tensor* const> params, AdamState& state);

void zero_grads(std::span<Tensor* const> params);
double grad_l2_norm(std::span<Tensor* const> params);
void clip_grads(std::span<Tensor* const> params, double max_norm);

// --- checkpoints ---------------------------------------------------------------

// Self-describing binary container: text header (key = value), then named
// little-endian float64 arrays with declared shapes. Round-trips bit-exactly.
struct Checkpoint {
  std::map<std::string, std::string> header;
  std::vector<std::tuple<std::string, std::size_t, std::size_t,
                         std::vector<double>>>
      arrays;

  const std::string& get(const std::string& key) const;
  void save(const std::filesystem::path& file) const;
  static Checkpoint load(const std::filesystem::path& file);
};

Checkpoint model_to_checkpoint(Model& model, const AdamState* adam, int epoch,
                               const std::string& rng_state,
                               std::uint64_t vocab_fingerprint);

// Rebuilds the model (including a frozen sentence encoder, when present).
// When expected_fingerprint is nonzero it must match the stored one.
Model model_from_checkpoint(const Checkpoint& ckpt,
                            std::uint64_t expected_fingerprint = 0);

Checkpoint encoder_to_checkpoint(SentenceEncoder& enc);
SentenceEncoder encoder_from_checkpoint(const Checkpoint& ckpt,
                                        std::uint64_t expected_fingerprint = 0);

// --- training loop --------------------------------------------------------------

struct TrainConfig {
  int epochs = 5;
  std::size_t batch_size = 100;
  double lr = 0.001;
  bool clip = false;  // L2 clip at norm 5
  std::uint64_t seed = 0;
};

struct EpochMetrics {
  int epoch = 0;
  double train_loss = 0.0;
  double dev_metric = 0.0;  // perplexity (unsupervised) or loss (supervised)
};

struct TrainResult {
  Checkpoint best;
  int best_epoch = -1;
  double best_metric = 0.0;
  std::vector<EpochMetrics> log;
  bool diverged = false;  // loss went non-finite; best holds the last good state
};

// Shuffles sentence instances per epoch (seeded), batches them, steps Adam,
// and keeps the best-dev checkpoint. Sentence representations for contextual
// topologies come from the frozen encoder and are cached once.
TrainResult train(Model& model, const std::vector<Document>& train_docs,
                  const std::vector<Document>& dev_docs,
                  const Vocabulary& vocab, const TrainConfig& cfg);

// Assembles a padded batch from sentence instances; exposed for tests.
PaddedBatch make_padded_batch(
    std::span<const std::pair<const Document*, int>> instances,
    bool lm_framing);

void append_metrics_log(const std::filesystem::path& file,
                        std::span<const EpochMetrics> log);

}  // namespace ooc
