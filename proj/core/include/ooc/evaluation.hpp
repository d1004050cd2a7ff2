#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ooc/models.hpp"

namespace ooc {

struct TokenScore {
  std::string doc_id;
  int sentence_index = 0;
  int token_index = 0;
  double score = 0.0;  // higher = more likely out-of-context
  int gold = 0;
};

// Per-token negative log probability under the (contextual) language model.
// One record per token; framing symbols are never scored. force_zero_context
// scores a contextual model with the context vector pinned to zero.
std::vector<TokenScore> score_lm(Model& model,
                                 const std::vector<Document>& docs,
                                 bool force_zero_context = false);

// P(out-of-context) per token from a binary classification model.
std::vector<TokenScore> score_binclass(Model& model,
                                       const std::vector<Document>& docs,
                                       bool force_zero_context = false);

// Dispatch on the model's topology.
std::vector<TokenScore> score_model(Model& model,
                                    const std::vector<Document>& docs,
                                    bool force_zero_context = false);

struct SweepPoint {
  std::size_t threshold = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f_score = 0.0;
};

struct SweepCurve {
  std::vector<SweepPoint> points;
  SweepPoint chosen;  // argmax F, ties to the smallest threshold
};

// Classify the top-t scores as out-of-context for every candidate t and
// compute precision/recall/F1. Ties in score break by position so repeated
// runs are identical. Thresholds default to 1..N.
SweepCurve sweep(std::vector<TokenScore> scores,
                 const std::vector<std::size_t>* thresholds = nullptr);

// exp(mean per-token NLL), natural log.
double perplexity(Model& model, const std::vector<Document>& docs);

struct EvalReport {
  std::string model_name;
  bool has_perplexity = false;
  double perplexity = 0.0;
  std::size_t dev_threshold = 0;   // chosen on dev
  std::size_t test_threshold = 0;  // proportionally rescaled
  SweepPoint test_point;
  SweepCurve dev_curve;
};

// The full protocol: sweep on dev, pick the best threshold, rescale it to the
// test size, report test precision/recall/F (plus perplexity when
// unsupervised).
EvalReport evaluate(Model& model, const std::vector<Document>& dev,
                    const std::vector<Document>& test,
                    const std::vector<std::size_t>* thresholds = nullptr);

// `model<TAB>perplexity<TAB>precision<TAB>recall<TAB>f_score`; perplexity
// column is `-` for supervised models.
void write_report(const std::filesystem::path& file, const EvalReport& report);

// `threshold<TAB>precision<TAB>recall<TAB>f_score`, one line per threshold.
void write_sweep(const std::filesystem::path& file, const SweepCurve& curve);

}  // namespace ooc
