#pragma once

#include <vector>

#include "ooc/corpus.hpp"

namespace ooc::synth {

// Topic-marker corpus: every document sticks to one latent topic and each
// sentence carries exactly one topic noun, so the topic is recoverable only
// from surrounding sentences. The controlled substitution pass then swaps
// nouns across topics, which is exactly the signal a context-aware model can
// exploit and a per-sentence baseline cannot.
struct SynthConfig {
  std::size_t docs = 200;
  std::size_t topics = 2;
  std::size_t nouns_per_topic = 20;
  std::size_t min_sentences = 12;
  std::size_t max_sentences = 16;
  int replacements_per_doc = 10;
  std::uint64_t seed = 0;
};

struct SynthCorpus {
  std::vector<Document> clean;
  std::vector<Document> corrupted;  // labels set at substituted positions
  CorruptionManifest manifest;      // standard answer-key format
};

SynthCorpus generate(const SynthConfig& cfg);

}  // namespace ooc::synth
