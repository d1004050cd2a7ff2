#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "ooc/errors.hpp"
#include "ooc/rng.hpp"

namespace ooc {

enum class Pos { Noun, Other };

struct Token {
  std::string surface;  // as written, capitalization preserved
  std::string lower;    // lowercased copy, the vocabulary key
  int vocab_id = -1;
  int label = 0;  // 1 only for tokens written by the corruption pass
  Pos pos = Pos::Other;
  bool pretagged = false;  // tag came from surface/TAG input
};

struct Sentence {
  std::vector<Token> tokens;
  int index = 0;  // position within the document
};

struct Document {
  std::string id;
  std::vector<Sentence> sentences;
};

// The |V| most frequent training-set types plus reserved symbols. Ids are
// dense; every out-of-vocabulary surface maps to <unk>.
class Vocabulary {
 public:
  static constexpr int kUnk = 0;
  static constexpr int kBos = 1;
  static constexpr int kEos = 2;
  static constexpr int kPad = 3;
  static constexpr std::size_t kReserved = 4;

  Vocabulary() = default;

  std::size_t size() const { return kReserved + words_.size(); }
  std::size_t word_count() const { return words_.size(); }

  int id_of(const std::string& lower) const {
    auto it = ids_.find(lower);
    return it == ids_.end() ? kUnk : it->second;
  }
  bool contains(const std::string& lower) const { return ids_.count(lower); }
  const std::string& surface_of(int id) const;

  // 1-based frequency rank among kept words; 0 for OOV.
  std::size_t rank_of(const std::string& lower) const {
    auto it = ids_.find(lower);
    return it == ids_.end() ? 0
                            : static_cast<std::size_t>(it->second) -
                                  kReserved + 1;
  }
  std::size_t count_of(const std::string& lower) const {
    auto it = ids_.find(lower);
    return it == ids_.end() ? 0 : counts_[it->second - kReserved];
  }
  // word at rank r (1-based)
  const std::string& word_at_rank(std::size_t r) const {
    return words_.at(r - 1);
  }

  std::uint64_t fingerprint() const;

  void save(const std::filesystem::path& file) const;
  static Vocabulary load(const std::filesystem::path& file);

  friend Vocabulary build_vocab(const std::vector<Document>& train,
                                std::size_t size);

 private:
  std::vector<std::string> words_;       // by descending frequency
  std::vector<std::size_t> counts_;      // aligned with words_
  std::unordered_map<std::string, int> ids_;
};

struct ManifestRecord {
  std::string doc_id;
  int sentence_index = 0;
  int token_index = 0;
  std::string original;
  std::string replacement;
};

// Ground-truth answer key for a corruption run. Replaying it on the clean
// corpus reproduces the corrupted corpus bit-exactly.
struct CorruptionManifest {
  std::uint64_t seed = 0;
  int rate = 0;
  int window_k = 0;
  std::vector<ManifestRecord> records;

  void save(const std::filesystem::path& file) const;
  static CorruptionManifest load(const std::filesystem::path& file);
};

// --- ingestion ---------------------------------------------------------------

// One sentence per line; punctuation split off as separate tokens. Accepts
// pre-tagged `surface/TAG` tokens, which override the heuristic tagger.
Document tokenize(const std::string& id, const std::string& raw_text);

// Reads every regular file in a directory as one document (file stem = id),
// sorted by id for determinism.
std::vector<Document> load_corpus_dir(const std::filesystem::path& dir);

void save_corpus_dir(const std::vector<Document>& docs,
                     const std::filesystem::path& dir);

// Line-aligned parallel corpus; target side keeps its own vocabulary.
std::vector<std::pair<Sentence, Sentence>> ingest_parallel(
    const std::filesystem::path& source_file,
    const std::filesystem::path& target_file);

// --- pipeline stages ----------------------------------------------------------

struct FilterStats {
  std::size_t sentences_dropped = 0;
  std::size_t documents_dropped = 0;
};

// Drops over-long and empty sentences, then documents too short to carry a
// context window.
FilterStats filter_dataset(std::vector<Document>& docs,
                           std::size_t max_sentence_len = 50,
                           std::size_t min_sentences = 11);

// Heuristic noun/other tagging: closed-class stoplist, noun suffixes, a
// shipped noun lexicon, and determiner+unknown-open-class fallback.
// Pre-tagged tokens are left alone.
void pos_tag(Document& doc);

// surface lowercased with plural suffix stripped (-ies->y, -ses->s, -s drop)
std::string lemma(const std::string& lower);
bool is_plural(const std::string& lower);

// Noun positions whose lemma occurs >= min_lemma_freq times in the document
// and whose surface is in-vocabulary.
std::vector<std::pair<int, int>> select_candidates(const Document& doc,
                                                   const Vocabulary& vocab,
                                                   std::size_t min_lemma_freq = 2);

// In-vocabulary noun surfaces with their frequency ranks, harvested from
// tagged documents; the replacement search space.
struct NounIndex {
  // rank -> surface, sorted by rank
  std::vector<std::pair<std::size_t, std::string>> by_rank;

  static NounIndex build(const std::vector<Document>& docs,
                         const Vocabulary& vocab);
};

// Nouns within +-k frequency ranks of the token, excluding the token itself
// and its lemma family.
std::vector<std::string> appearance_window(const Token& token,
                                           const Vocabulary& vocab,
                                           const NounIndex& nouns, int k);

// Filters candidates to matching grammatical number, picks the closest in
// frequency rank (ties lexicographic), and copies the original's
// capitalization pattern.
std::optional<std::string> match_inflection(const Token& original,
                                            std::span<const std::string> candidates,
                                            const Vocabulary& vocab);

// The five-stage replacement procedure over filtered, tagged documents.
// Deterministic given (seed, doc ids); per-document child streams make the
// result schedule-independent.
std::pair<std::vector<Document>, CorruptionManifest> corrupt_corpus(
    const std::vector<Document>& docs, const Vocabulary& vocab, int rate,
    int window_k, std::uint64_t seed);

// Applies a manifest to a clean corpus; errors if any record does not line up.
std::vector<Document> replay(const CorruptionManifest& manifest,
                             const std::vector<Document>& clean);

// Marks label=1 at manifest positions (for corpora reloaded from disk).
void apply_manifest_labels(std::vector<Document>& docs,
                           const CorruptionManifest& manifest);

struct Splits {
  std::vector<Document> train, dev, test;
};

// Document-level 60/20/20 partition, rounded to nearest with the remainder
// going to train.
Splits split_corpus(const std::vector<Document>& docs, std::uint64_t seed);

Vocabulary build_vocab(const std::vector<Document>& train, std::size_t size);

// Assigns vocab ids to every token (OOV -> <unk>).
void apply_vocab(std::vector<Document>& docs, const Vocabulary& vocab);
void apply_vocab(Sentence& sentence, const Vocabulary& vocab);

}  // namespace ooc
