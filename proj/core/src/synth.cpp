#include "ooc/synth.hpp"

#include <algorithm>
#include <sstream>

namespace ooc::synth {

namespace {

const char* kSyllables[] = {"ba", "re", "mi", "to", "ku", "se", "na",
                            "lo", "pi", "du", "fa", "go", "he", "vi",
                            "zo", "ma", "te", "ri", "su", "no"};
const char* kPrefixes[] = {"zan", "quil", "vop", "drex"};

std::string topic_noun(std::size_t topic, std::size_t index) {
  std::string base = kPrefixes[topic % std::size(kPrefixes)];
  base += kSyllables[index % std::size(kSyllables)];
  // keep names unique past one syllable table
  for (std::size_t round = index / std::size(kSyllables); round > 0; --round)
    base += kSyllables[(index + round) % std::size(kSyllables)];
  return base;
}

}  // namespace

SynthCorpus generate(const SynthConfig& cfg) {
  if (cfg.topics < 2) throw ContractError("synth: need at least 2 topics");
  if (cfg.min_sentences > cfg.max_sentences)
    throw ContractError("synth: min_sentences > max_sentences");
  if (static_cast<std::size_t>(cfg.replacements_per_doc) > cfg.min_sentences)
    throw ContractError("synth: more replacements than sentences");

  SynthCorpus out;
  out.manifest.seed = cfg.seed;
  out.manifest.rate = cfg.replacements_per_doc;
  out.manifest.window_k = 1;  // swaps go to the same-index noun next topic over
  Rng base(cfg.seed);

  for (std::size_t d = 0; d < cfg.docs; ++d) {
    std::ostringstream id;
    id << "synth-";
    id.width(3);
    id.fill('0');
    id << d;
    Rng rng = base.child("synth:" + id.str());
    std::size_t topic = d % cfg.topics;

    std::size_t n_sent =
        cfg.min_sentences + rng.below(cfg.max_sentences - cfg.min_sentences + 1);
    std::ostringstream text;
    for (std::size_t s = 0; s < n_sent; ++s) {
      std::string noun = topic_noun(topic, rng.below(cfg.nouns_per_topic));
      // keep the topic noun early (so a context-conditioned decoder reaches
      // it quickly) and near the end (so a sentence encoder's final state
      // still carries it); every other token is deterministic, which
      // concentrates the learning signal on the noun choice
      text << "the " << noun << " .\n";
    }
    Document doc = tokenize(id.str(), text.str());
    pos_tag(doc);
    out.clean.push_back(doc);

    // controlled cross-topic substitution: the single topic noun of
    // `replacements_per_doc` distinct sentences moves to the next topic
    std::vector<int> order(doc.sentences.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    rng.shuffle(order);
    std::sort(order.begin(), order.begin() + cfg.replacements_per_doc);
    for (int r = 0; r < cfg.replacements_per_doc; ++r) {
      int si = order[r];
      // "the <noun> ." puts the topic noun at index 1
      int ti = 1;
      Token& tok = doc.sentences[si].tokens[ti];
      std::string original = tok.surface;
      // recover the inventory index so the swap stays frequency-matched
      std::size_t idx = 0;
      for (; idx < cfg.nouns_per_topic; ++idx)
        if (topic_noun(topic, idx) == original) break;
      std::string repl = topic_noun((topic + 1) % cfg.topics, idx);
      tok.surface = repl;
      tok.lower = repl;
      tok.label = 1;
      out.manifest.records.push_back({doc.id, si, ti, original, repl});
    }
    out.corrupted.push_back(std::move(doc));
  }
  return out;
}

}  // namespace ooc::synth
