#include "ooc/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

namespace ooc {

namespace {

std::string to_lower(const std::string& s) {
  std::string out = s;
  for (char& c : out)
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

bool is_punct_char(char c) {
  static const std::string punct = ".,!?;:\"'()[]{}";
  return punct.find(c) != std::string::npos;
}

bool all_punct(const std::string& s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), is_punct_char);
}

bool all_alpha(const std::string& s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalpha(static_cast<unsigned char>(c)) || c == '-' ||
           c == '\'';
  });
}

// Closed-class stoplist: determiners, pronouns, prepositions, auxiliaries,
// conjunctions and a few frequent adverbs. Never nouns.
const std::unordered_set<std::string>& stoplist() {
  static const std::unordered_set<std::string> words = {
      // determiners
      "the", "a", "an", "this", "that", "these", "those", "my", "your", "his",
      "her", "its", "our", "their", "some", "any", "no", "every", "each",
      "all", "both", "either", "neither", "much", "many", "more", "most",
      "few", "several", "such", "what", "which", "whose",
      // pronouns
      "i", "you", "he", "she", "it", "we", "they", "me", "him", "us", "them",
      "mine", "yours", "hers", "ours", "theirs", "myself", "yourself",
      "himself", "herself", "itself", "ourselves", "themselves", "who",
      "whom", "something", "anything", "nothing", "everything", "someone",
      "anyone", "everyone", "nobody",
      // prepositions
      "of", "in", "on", "at", "by", "for", "with", "from", "to", "into",
      "onto", "over", "under", "about", "against", "between", "among",
      "through", "during", "before", "after", "above", "below", "up", "down",
      "out", "off", "around", "near", "within", "without", "across", "behind",
      "beyond", "toward", "towards", "upon",
      // auxiliaries and modals
      "is", "am", "are", "was", "were", "be", "been", "being", "do", "does",
      "did", "have", "has", "had", "will", "would", "can", "could", "shall",
      "should", "may", "might", "must",
      // conjunctions and frequent adverbs
      "and", "or", "but", "if", "because", "as", "while", "than", "so",
      "not", "very", "too", "also", "just", "only", "even", "still", "then",
      "there", "here", "when", "where", "why", "how", "now", "never", "ever",
      "always", "often", "again", "once", "other", "another", "yes",
      "whether", "rather", "together"};
  return words;
}

const std::unordered_set<std::string>& determiners() {
  static const std::unordered_set<std::string> words = {
      "the",  "a",     "an",  "this", "that",  "these", "those",
      "my",   "your",  "his", "her",  "its",   "our",   "their",
      "some", "any",   "no",  "every", "each", "all",   "both"};
  return words;
}

// Shipped open-class noun lexicon. Small on purpose; the suffix and
// determiner rules carry the rest.
const std::unordered_set<std::string>& noun_lexicon() {
  static const std::unordered_set<std::string> words = {
      "engineering", "performance", "life",       "explanation", "technology",
      "country",     "artist",      "world",      "people",      "time",
      "year",        "day",         "way",        "thing",       "man",
      "woman",       "child",       "light",      "bulb",        "data",
      "issue",       "business",    "importance", "idea",        "problem",
      "question",    "answer",      "story",      "word",        "sentence",
      "language",    "system",      "model",      "network",     "computer",
      "machine",     "science",     "research",   "school",      "student",
      "teacher",     "house",       "city",       "water",       "energy",
      "power",       "money",       "market",     "company",     "work",
      "job",         "hand",        "eye",        "head",        "heart",
      "brain",       "body",        "family",     "friend",      "group",
      "number",      "part",        "place",      "point",       "area",
      "book",        "paper",       "music",      "art",         "film",
      "game",        "food",        "tree",       "animal",      "bird",
      "fish",        "car",         "road",       "bridge",      "building",
      "room",        "door",        "window",     "table",       "chair",
      "phone",       "talk",        "speech",     "sound",       "voice",
      "picture",     "image",       "color",      "line",        "space",
      "earth",       "sun",         "moon",       "star",        "sky",
      "ocean",       "river",       "mountain",   "forest",      "field"};
  return words;
}

bool noun_suffix(const std::string& s) {
  static const std::vector<std::string> suffixes = {"tion", "ment", "ness",
                                                    "ity", "ism", "er"};
  if (s.size() < 5) return false;
  for (const auto& suf : suffixes)
    if (s.size() > suf.size() + 2 &&
        s.compare(s.size() - suf.size(), suf.size(), suf) == 0)
      return true;
  return false;
}

void emit_token(Sentence& sent, const std::string& piece) {
  // pre-tagged `surface/TAG` with an all-caps tag overrides the heuristic
  auto slash = piece.rfind('/');
  if (slash != std::string::npos && slash > 0 && slash + 1 < piece.size()) {
    std::string tag = piece.substr(slash + 1);
    if (std::all_of(tag.begin(), tag.end(), [](char c) {
          return std::isupper(static_cast<unsigned char>(c));
        })) {
      Token t;
      t.surface = piece.substr(0, slash);
      t.lower = to_lower(t.surface);
      t.pos = tag[0] == 'N' ? Pos::Noun : Pos::Other;
      t.pretagged = true;
      sent.tokens.push_back(std::move(t));
      return;
    }
  }
  // split leading/trailing punctuation into separate tokens
  std::size_t lo = 0, hi = piece.size();
  while (lo < hi && is_punct_char(piece[lo])) ++lo;
  while (hi > lo && is_punct_char(piece[hi - 1])) --hi;
  auto push = [&](const std::string& s) {
    Token t;
    t.surface = s;
    t.lower = to_lower(s);
    sent.tokens.push_back(std::move(t));
  };
  if (lo == hi) {  // all punctuation
    for (char c : piece) push(std::string(1, c));
    return;
  }
  for (std::size_t i = 0; i < lo; ++i) push(std::string(1, piece[i]));
  push(piece.substr(lo, hi - lo));
  for (std::size_t i = hi; i < piece.size(); ++i) push(std::string(1, piece[i]));
}

}  // namespace

Document tokenize(const std::string& id, const std::string& raw_text) {
  Document doc;
  doc.id = id;
  std::istringstream in(raw_text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    Sentence sent;
    std::istringstream ls(line);
    std::string piece;
    while (ls >> piece) emit_token(sent, piece);
    if (sent.tokens.empty()) continue;
    sent.index = static_cast<int>(doc.sentences.size());
    doc.sentences.push_back(std::move(sent));
  }
  if (doc.sentences.empty())
    throw DataError("empty document: " + id);
  return doc;
}

std::vector<Document> load_corpus_dir(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir))
    throw DataError("not a directory: " + dir.string());
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(dir))
    if (e.is_regular_file()) files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::vector<Document> docs;
  for (const auto& f : files) {
    std::ifstream is(f);
    std::stringstream ss;
    ss << is.rdbuf();
    docs.push_back(tokenize(f.stem().string(), ss.str()));
  }
  return docs;
}

void save_corpus_dir(const std::vector<Document>& docs,
                     const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  for (const Document& doc : docs) {
    std::ofstream os(dir / (doc.id + ".txt"));
    for (const Sentence& s : doc.sentences) {
      for (std::size_t i = 0; i < s.tokens.size(); ++i) {
        if (i) os << ' ';
        os << s.tokens[i].surface;
      }
      os << '\n';
    }
  }
}

std::vector<std::pair<Sentence, Sentence>> ingest_parallel(
    const std::filesystem::path& source_file,
    const std::filesystem::path& target_file) {
  auto read_lines = [](const std::filesystem::path& f) {
    std::ifstream is(f);
    if (!is) throw DataError("cannot read " + f.string());
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(is, line)) lines.push_back(line);
    return lines;
  };
  auto src = read_lines(source_file);
  auto tgt = read_lines(target_file);
  if (src.size() != tgt.size())
    throw DataError("parallel corpus alignment error: " +
                    std::to_string(src.size()) + " source lines vs " +
                    std::to_string(tgt.size()) + " target lines");
  std::vector<std::pair<Sentence, Sentence>> pairs;
  for (std::size_t i = 0; i < src.size(); ++i) {
    Sentence a, b;
    std::istringstream sa(src[i]), sb(tgt[i]);
    std::string piece;
    while (sa >> piece) emit_token(a, piece);
    while (sb >> piece) emit_token(b, piece);
    if (a.tokens.empty() || b.tokens.empty()) continue;
    a.index = b.index = static_cast<int>(i);
    pairs.emplace_back(std::move(a), std::move(b));
  }
  return pairs;
}

FilterStats filter_dataset(std::vector<Document>& docs,
                           std::size_t max_sentence_len,
                           std::size_t min_sentences) {
  FilterStats stats;
  for (Document& doc : docs) {
    std::vector<Sentence> kept;
    for (Sentence& s : doc.sentences) {
      if (s.tokens.empty() || s.tokens.size() > max_sentence_len) {
        ++stats.sentences_dropped;
        continue;
      }
      s.index = static_cast<int>(kept.size());
      kept.push_back(std::move(s));
    }
    doc.sentences = std::move(kept);
  }
  std::vector<Document> survivors;
  for (Document& doc : docs) {
    if (doc.sentences.size() < min_sentences) {
      ++stats.documents_dropped;
      continue;
    }
    survivors.push_back(std::move(doc));
  }
  docs = std::move(survivors);
  if (docs.empty())
    std::cerr << "warning: filter_dataset left an empty corpus\n";
  return stats;
}

std::string lemma(const std::string& lower) {
  std::size_t n = lower.size();
  if (n > 3 && lower.compare(n - 3, 3, "ies") == 0)
    return lower.substr(0, n - 3) + "y";
  if (n > 3 && lower.compare(n - 3, 3, "ses") == 0)
    return lower.substr(0, n - 2);  // -ses -> -s
  if (n > 1 && lower.back() == 's' && lower[n - 2] != 's')
    return lower.substr(0, n - 1);
  return lower;
}

bool is_plural(const std::string& lower) { return lemma(lower) != lower; }

void pos_tag(Document& doc) {
  for (Sentence& sent : doc.sentences) {
    for (std::size_t i = 0; i < sent.tokens.size(); ++i) {
      Token& t = sent.tokens[i];
      if (t.pretagged) continue;
      const std::string& w = t.lower;
      if (all_punct(w) || stoplist().count(w)) {
        t.pos = Pos::Other;
        continue;
      }
      std::string lem = lemma(w);
      if (noun_lexicon().count(w) || noun_lexicon().count(lem) ||
          noun_suffix(lem)) {
        t.pos = Pos::Noun;
        continue;
      }
      bool after_det = i > 0 && determiners().count(sent.tokens[i - 1].lower);
      t.pos = (after_det && all_alpha(w)) ? Pos::Noun : Pos::Other;
    }
  }
}

std::vector<std::pair<int, int>> select_candidates(const Document& doc,
                                                   const Vocabulary& vocab,
                                                   std::size_t min_lemma_freq) {
  std::unordered_map<std::string, std::size_t> lemma_freq;
  for (const Sentence& s : doc.sentences)
    for (const Token& t : s.tokens) ++lemma_freq[lemma(t.lower)];
  std::vector<std::pair<int, int>> out;
  for (const Sentence& s : doc.sentences)
    for (std::size_t i = 0; i < s.tokens.size(); ++i) {
      const Token& t = s.tokens[i];
      if (t.pos != Pos::Noun) continue;
      if (!vocab.contains(t.lower)) continue;
      if (lemma_freq[lemma(t.lower)] < min_lemma_freq) continue;
      out.emplace_back(s.index, static_cast<int>(i));
    }
  return out;
}

NounIndex NounIndex::build(const std::vector<Document>& docs,
                           const Vocabulary& vocab) {
  std::unordered_set<std::string> seen;
  for (const Document& d : docs)
    for (const Sentence& s : d.sentences)
      for (const Token& t : s.tokens)
        if (t.pos == Pos::Noun && vocab.contains(t.lower)) seen.insert(t.lower);
  NounIndex idx;
  for (const std::string& w : seen) idx.by_rank.emplace_back(vocab.rank_of(w), w);
  std::sort(idx.by_rank.begin(), idx.by_rank.end());
  return idx;
}

std::vector<std::string> appearance_window(const Token& token,
                                           const Vocabulary& vocab,
                                           const NounIndex& nouns, int k) {
  std::size_t r = vocab.rank_of(token.lower);
  if (r == 0)
    throw ContractError("appearance_window: token '" + token.lower +
                        "' is out of vocabulary");
  std::string fam = lemma(token.lower);
  std::vector<std::string> out;
  for (const auto& [rank, word] : nouns.by_rank) {
    long d = static_cast<long>(rank) - static_cast<long>(r);
    if (d < -k || d > k) continue;
    if (word == token.lower || lemma(word) == fam) continue;
    out.push_back(word);
  }
  return out;
}

std::optional<std::string> match_inflection(
    const Token& original, std::span<const std::string> candidates,
    const Vocabulary& vocab) {
  bool plural = is_plural(original.lower);
  std::size_t orig_rank = vocab.rank_of(original.lower);
  std::optional<std::string> best;
  std::size_t best_dist = 0;
  for (const std::string& cand : candidates) {
    if (is_plural(cand) != plural) continue;
    std::size_t r = vocab.rank_of(cand);
    std::size_t dist = r > orig_rank ? r - orig_rank : orig_rank - r;
    if (!best || dist < best_dist || (dist == best_dist && cand < *best)) {
      best = cand;
      best_dist = dist;
    }
  }
  if (!best) return std::nullopt;
  std::string repl = *best;
  if (!original.surface.empty() &&
      std::isupper(static_cast<unsigned char>(original.surface[0])))
    repl[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(repl[0])));
  return repl;
}

std::pair<std::vector<Document>, CorruptionManifest> corrupt_corpus(
    const std::vector<Document>& docs, const Vocabulary& vocab, int rate,
    int window_k, std::uint64_t seed) {
  if (rate < 1) throw ContractError("corrupt_corpus: rate must be >= 1");
  NounIndex nouns = NounIndex::build(docs, vocab);
  std::vector<Document> out = docs;
  CorruptionManifest manifest;
  manifest.seed = seed;
  manifest.rate = rate;
  manifest.window_k = window_k;
  Rng base(seed);
  for (Document& doc : out) {
    Rng rng = base.child("corrupt:" + doc.id);
    auto candidates = select_candidates(doc, vocab);
    if (candidates.empty()) {
      std::cerr << "warning: no corruption candidates in document " << doc.id
                << "\n";
      continue;
    }
    rng.shuffle(candidates);
    int applied = 0;
    for (const auto& [si, ti] : candidates) {
      if (applied >= rate) break;
      Token& tok = doc.sentences[si].tokens[ti];
      auto window = appearance_window(tok, vocab, nouns, window_k);
      auto repl = match_inflection(tok, window, vocab);
      if (!repl) continue;  // position skipped, draw the next one
      ManifestRecord rec;
      rec.doc_id = doc.id;
      rec.sentence_index = si;
      rec.token_index = ti;
      rec.original = tok.surface;
      rec.replacement = *repl;
      manifest.records.push_back(std::move(rec));
      tok.surface = *repl;
      tok.lower = to_lower(*repl);
      tok.vocab_id = vocab.id_of(tok.lower);
      tok.label = 1;
      ++applied;
    }
  }
  return {std::move(out), std::move(manifest)};
}

std::vector<Document> replay(const CorruptionManifest& manifest,
                             const std::vector<Document>& clean) {
  std::vector<Document> out = clean;
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < out.size(); ++i) index[out[i].id] = i;
  std::vector<std::string> missing;
  for (const ManifestRecord& rec : manifest.records) {
    auto it = index.find(rec.doc_id);
    if (it == index.end()) {
      missing.push_back(rec.doc_id);
      continue;
    }
    Document& doc = out[it->second];
    if (rec.sentence_index < 0 ||
        rec.sentence_index >= static_cast<int>(doc.sentences.size()))
      throw DataError("replay: sentence index out of range in " + rec.doc_id);
    Sentence& sent = doc.sentences[rec.sentence_index];
    if (rec.token_index < 0 ||
        rec.token_index >= static_cast<int>(sent.tokens.size()))
      throw DataError("replay: token index out of range in " + rec.doc_id);
    Token& tok = sent.tokens[rec.token_index];
    if (tok.surface != rec.original)
      throw DataError("replay: expected '" + rec.original + "' at " +
                      rec.doc_id + ":" + std::to_string(rec.sentence_index) +
                      ":" + std::to_string(rec.token_index) + ", found '" +
                      tok.surface + "'");
    tok.surface = rec.replacement;
    tok.lower = to_lower(rec.replacement);
    tok.label = 1;
  }
  if (!missing.empty()) {
    std::sort(missing.begin(), missing.end());
    missing.erase(std::unique(missing.begin(), missing.end()), missing.end());
    std::string msg = "replay: documents missing from clean corpus:";
    for (const auto& m : missing) msg += " " + m;
    throw DataError(msg);
  }
  return out;
}

void apply_manifest_labels(std::vector<Document>& docs,
                           const CorruptionManifest& manifest) {
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < docs.size(); ++i) index[docs[i].id] = i;
  for (const ManifestRecord& rec : manifest.records) {
    auto it = index.find(rec.doc_id);
    if (it == index.end()) continue;  // split dirs hold a subset of records
    Document& doc = docs[it->second];
    if (rec.sentence_index >= static_cast<int>(doc.sentences.size())) continue;
    Sentence& sent = doc.sentences[rec.sentence_index];
    if (rec.token_index >= static_cast<int>(sent.tokens.size())) continue;
    sent.tokens[rec.token_index].label = 1;
  }
}

Splits split_corpus(const std::vector<Document>& docs, std::uint64_t seed) {
  if (docs.size() < 5)
    throw ContractError("split_corpus: need at least 5 documents, got " +
                        std::to_string(docs.size()));
  std::vector<std::size_t> order(docs.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng = Rng(seed).child("split");
  rng.shuffle(order);
  std::size_t n = docs.size();
  std::size_t n_dev = static_cast<std::size_t>(std::llround(0.2 * n));
  std::size_t n_test = static_cast<std::size_t>(std::llround(0.2 * n));
  std::size_t n_train = n - n_dev - n_test;
  Splits splits;
  for (std::size_t i = 0; i < n; ++i) {
    const Document& d = docs[order[i]];
    if (i < n_train)
      splits.train.push_back(d);
    else if (i < n_train + n_dev)
      splits.dev.push_back(d);
    else
      splits.test.push_back(d);
  }
  return splits;
}

Vocabulary build_vocab(const std::vector<Document>& train, std::size_t size) {
  if (size + Vocabulary::kReserved < 5 || size < 1)
    throw ContractError("build_vocab: |V| must be >= 5 including reserved "
                        "symbols, got kept size " + std::to_string(size));
  std::unordered_map<std::string, std::size_t> freq;
  for (const Document& d : train)
    for (const Sentence& s : d.sentences)
      for (const Token& t : s.tokens) ++freq[t.lower];
  std::vector<std::pair<std::string, std::size_t>> sorted(freq.begin(),
                                                          freq.end());
  std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  if (sorted.size() > size) sorted.resize(size);
  Vocabulary vocab;
  for (const auto& [word, count] : sorted) {
    vocab.ids_[word] = static_cast<int>(Vocabulary::kReserved +
                                        vocab.words_.size());
    vocab.words_.push_back(word);
    vocab.counts_.push_back(count);
  }
  return vocab;
}

void apply_vocab(Sentence& sentence, const Vocabulary& vocab) {
  for (Token& t : sentence.tokens) t.vocab_id = vocab.id_of(t.lower);
}

void apply_vocab(std::vector<Document>& docs, const Vocabulary& vocab) {
  for (Document& d : docs)
    for (Sentence& s : d.sentences) apply_vocab(s, vocab);
}

// --- vocabulary / manifest io --------------------------------------------------

const std::string& Vocabulary::surface_of(int id) const {
  static const std::vector<std::string> reserved = {"<unk>", "<s>", "</s>",
                                                    "<pad>"};
  if (id < 0 || static_cast<std::size_t>(id) >= size())
    throw IndexError("surface_of: id " + std::to_string(id) + " out of range");
  if (static_cast<std::size_t>(id) < kReserved) return reserved[id];
  return words_[id - kReserved];
}

std::uint64_t Vocabulary::fingerprint() const {
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&h](const std::string& s) {
    for (char c : s) {
      h ^= static_cast<unsigned char>(c);
      h *= 1099511628211ull;
    }
    h ^= 0xffu;  // separator
    h *= 1099511628211ull;
  };
  for (const std::string& w : words_) mix(w);
  return h;
}

void Vocabulary::save(const std::filesystem::path& file) const {
  std::ofstream os(file);
  if (!os) throw DataError("cannot write " + file.string());
  os << "# ooc-vocab 1\n";
  for (std::size_t i = 0; i < words_.size(); ++i)
    os << words_[i] << '\t' << counts_[i] << '\n';
}

Vocabulary Vocabulary::load(const std::filesystem::path& file) {
  std::ifstream is(file);
  if (!is) throw DataError("cannot read " + file.string());
  std::string line;
  if (!std::getline(is, line) || line.rfind("# ooc-vocab", 0) != 0)
    throw DataError("not a vocabulary file: " + file.string());
  Vocabulary vocab;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos)
      throw DataError("malformed vocabulary line: " + line);
    std::string word = line.substr(0, tab);
    std::size_t count = std::stoull(line.substr(tab + 1));
    vocab.ids_[word] = static_cast<int>(kReserved + vocab.words_.size());
    vocab.words_.push_back(word);
    vocab.counts_.push_back(count);
  }
  return vocab;
}

void CorruptionManifest::save(const std::filesystem::path& file) const {
  std::ofstream os(file);
  if (!os) throw DataError("cannot write " + file.string());
  os << "# seed=" << seed << "\trate=" << rate << "\tk=" << window_k << '\n';
  for (const ManifestRecord& r : records)
    os << r.doc_id << '\t' << r.sentence_index << '\t' << r.token_index << '\t'
       << r.original << '\t' << r.replacement << '\n';
}

CorruptionManifest CorruptionManifest::load(const std::filesystem::path& file) {
  std::ifstream is(file);
  if (!is) throw DataError("cannot read manifest " + file.string());
  std::string line;
  if (!std::getline(is, line) || line.empty() || line[0] != '#')
    throw DataError("manifest missing header: " + file.string());
  CorruptionManifest m;
  {
    std::istringstream hs(line.substr(1));
    std::string kv;
    while (hs >> kv) {
      auto eq = kv.find('=');
      if (eq == std::string::npos) continue;
      std::string key = kv.substr(0, eq), val = kv.substr(eq + 1);
      if (key == "seed") m.seed = std::stoull(val);
      if (key == "rate") m.rate = std::stoi(val);
      if (key == "k") m.window_k = std::stoi(val);
    }
  }
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
      auto tab = line.find('\t', start);
      fields.push_back(line.substr(start, tab - start));
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    if (fields.size() != 5)
      throw DataError("malformed manifest line: " + line);
    ManifestRecord r;
    r.doc_id = fields[0];
    r.sentence_index = std::stoi(fields[1]);
    r.token_index = std::stoi(fields[2]);
    r.original = fields[3];
    r.replacement = fields[4];
    m.records.push_back(std::move(r));
  }
  return m;
}

}  // namespace ooc
