#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

#include "ooc/corpus.hpp"

using namespace ooc;

namespace {

// Natural-style fixture: sentences cycle through lexicon nouns so every noun
// lemma repeats within its document and all nouns are in-vocabulary.
std::vector<Document> fixture_corpus(int docs, int sentences_per_doc) {
  const std::vector<std::string> nouns = {
      "teacher", "student", "school",   "book",   "river",  "mountain",
      "ocean",   "forest",  "city",     "house",  "market", "company",
      "computer", "machine", "picture", "window", "table",  "chair"};
  const std::vector<std::string> verbs = {"shows", "finds", "keeps",
                                          "takes", "holds", "brings"};
  std::vector<Document> out;
  for (int d = 0; d < docs; ++d) {
    std::ostringstream text;
    for (int s = 0; s < sentences_per_doc; ++s) {
      const std::string& a = nouns[(d + s) % nouns.size()];
      const std::string& b = nouns[(d + s + 3) % nouns.size()];
      const std::string& c = nouns[(d + s + 7) % nouns.size()];
      text << "The " << a << ' ' << verbs[s % verbs.size()] << " the " << b
           << " near the " << c << " .\n";
    }
    Document doc = tokenize("doc" + std::to_string(100 + d), text.str());
    pos_tag(doc);
    out.push_back(std::move(doc));
  }
  return out;
}

std::string flatten(const std::vector<Document>& docs) {
  std::ostringstream os;
  for (const auto& d : docs) {
    os << d.id << '\n';
    for (const auto& s : d.sentences) {
      for (const auto& t : s.tokens) os << t.surface << ' ' << t.label << '|';
      os << '\n';
    }
  }
  return os.str();
}

}  // namespace

TEST_CASE("tokenize splits punctuation and lowercases a copy") {
  Document doc = tokenize("d", "We use it everyday.\n");
  REQUIRE(doc.sentences.size() == 1);
  const auto& toks = doc.sentences[0].tokens;
  REQUIRE(toks.size() == 5);
  CHECK(toks[0].lower == "we");
  CHECK(toks[0].surface == "We");
  CHECK(toks[3].lower == "everyday");
  CHECK(toks[4].surface == ".");
}

TEST_CASE("tokenize rejects blank input and counts sentences") {
  CHECK_THROWS_AS(tokenize("d", "\n\n"), DataError);
  Document doc = tokenize("d", "one line .\nanother line .\na third .\n");
  CHECK(doc.sentences.size() == 3);
}

TEST_CASE("tokenize accepts pre-tagged tokens") {
  Document doc = tokenize("d", "run/NN fast/RB\n");
  pos_tag(doc);
  CHECK(doc.sentences[0].tokens[0].pos == Pos::Noun);
  CHECK(doc.sentences[0].tokens[0].surface == "run");
  CHECK(doc.sentences[0].tokens[1].pos == Pos::Other);
}

TEST_CASE("filter drops long sentences then short documents") {
  std::ostringstream text;
  for (int i = 0; i < 11; ++i) text << "a short sentence .\n";
  std::string long_line;
  for (int i = 0; i < 51; ++i) long_line += "word ";
  text << long_line << "\n";
  std::vector<Document> docs = {tokenize("keep", text.str()),
                                tokenize("drop", "one .\ntwo .\nthree .\nfour .\nfive .\n")};
  FilterStats stats = filter_dataset(docs);
  REQUIRE(docs.size() == 1);
  CHECK(docs[0].id == "keep");
  CHECK(docs[0].sentences.size() == 11);
  CHECK(stats.sentences_dropped == 1);
  CHECK(stats.documents_dropped == 1);

  std::vector<Document> none;
  filter_dataset(none);  // empty in, empty out, warning only
  CHECK(none.empty());
}

TEST_CASE("pos tagger rules") {
  Document doc = tokenize(
      "d", "The engineering of the bridge was great .\nShe walked home .\n");
  pos_tag(doc);
  const auto& s0 = doc.sentences[0].tokens;
  CHECK(s0[0].pos == Pos::Other);  // determiner
  CHECK(s0[1].pos == Pos::Noun);   // lexicon + -ing? (lexicon word)
  CHECK(s0[4].pos == Pos::Noun);   // unknown open-class after determiner
  CHECK(s0[7].pos == Pos::Other);  // punctuation
}

TEST_CASE("lemma and plural heuristics") {
  CHECK(lemma("stories") == "story");
  CHECK(lemma("buses") == "bus");
  CHECK(lemma("books") == "book");
  CHECK(lemma("glass") == "glass");  // -ss is not a plural
  CHECK(is_plural("books"));
  CHECK(!is_plural("glass"));
}

TEST_CASE("candidate selection needs repetition and vocabulary membership") {
  Document doc = tokenize("d",
                          "the river meets the river near the ocean .\n"
                          "the zyxwv sits by the zyxwv again .\n");
  pos_tag(doc);
  std::vector<Document> train = {doc};
  Vocabulary vocab = build_vocab(train, 50);
  // drop zyxwv from the vocabulary by rebuilding without it
  Document clean = tokenize("d", "the river meets the river near the ocean .\n");
  pos_tag(clean);
  std::vector<Document> small = {clean};
  Vocabulary v2 = build_vocab(small, 50);

  auto cands = select_candidates(doc, v2);
  std::set<std::pair<int, int>> got(cands.begin(), cands.end());
  CHECK(got.count({0, 1}));  // river twice -> both positions
  CHECK(got.count({0, 4}));
  CHECK(!got.count({0, 7}));  // ocean occurs once
  CHECK(!got.count({1, 1}));  // zyxwv repeats but is OOV
}

TEST_CASE("appearance window is a rank band excluding the lemma family") {
  auto docs = fixture_corpus(4, 12);
  Vocabulary vocab = build_vocab(docs, 100);
  NounIndex nouns = NounIndex::build(docs, vocab);

  Token probe;
  probe.surface = probe.lower = "river";
  std::size_t r = vocab.rank_of("river");
  auto window = appearance_window(probe, vocab, nouns, 50);
  CHECK(!window.empty());
  for (const auto& w : window) {
    CHECK(w != "river");
    CHECK(lemma(w) != "river");
    long d = static_cast<long>(vocab.rank_of(w)) - static_cast<long>(r);
    CHECK(std::abs(d) <= 50);
  }
  auto tight = appearance_window(probe, vocab, nouns, 0);
  for (const auto& w : tight) CHECK(vocab.rank_of(w) == r);

  Token oov;
  oov.surface = oov.lower = "zzzz";
  CHECK_THROWS_AS(appearance_window(oov, vocab, nouns, 5), ContractError);
}

TEST_CASE("inflection matching keeps number and capitalization") {
  auto docs = fixture_corpus(4, 12);
  Vocabulary vocab = build_vocab(docs, 100);

  Token orig;
  orig.surface = "Books";
  orig.lower = "books";
  std::vector<std::string> candidates = {"table", "chairs", "windows"};
  auto repl = match_inflection(orig, candidates, vocab);
  REQUIRE(repl.has_value());
  CHECK(*repl == "Chairs");  // plural survivors only, ties lexicographic
  CHECK(std::isupper(static_cast<unsigned char>((*repl)[0])));

  Token singular;
  singular.surface = singular.lower = "book";
  std::vector<std::string> plural_only = {"chairs", "windows"};
  CHECK(!match_inflection(singular, plural_only, vocab).has_value());
}

TEST_CASE("inflection matching reproduces the engineering example") {
  Document doc = tokenize("d", "the engineering helps the performance .\n");
  pos_tag(doc);
  std::vector<Document> train = {doc};
  Vocabulary vocab = build_vocab(train, 50);
  Token orig;
  orig.surface = orig.lower = "engineering";
  std::vector<std::string> window = {"performance"};
  auto repl = match_inflection(orig, window, vocab);
  REQUIRE(repl.has_value());
  CHECK(*repl == "performance");
}

TEST_CASE("corruption is deterministic and honors the quota") {
  auto docs = fixture_corpus(6, 14);
  Vocabulary vocab = build_vocab(docs, 100);
  auto [c1, m1] = corrupt_corpus(docs, vocab, 10, 50, 77);
  auto [c2, m2] = corrupt_corpus(docs, vocab, 10, 50, 77);
  CHECK(flatten(c1) == flatten(c2));
  REQUIRE(m1.records.size() == m2.records.size());

  std::map<std::string, int> per_doc;
  for (const auto& r : m1.records) ++per_doc[r.doc_id];
  for (const auto& d : docs) CHECK(per_doc[d.id] == 10);
}

TEST_CASE("corruption only touches manifest positions") {
  auto docs = fixture_corpus(5, 14);
  Vocabulary vocab = build_vocab(docs, 100);
  auto [corrupted, manifest] = corrupt_corpus(docs, vocab, 8, 50, 5);

  std::set<std::tuple<std::string, int, int>> touched;
  for (const auto& r : manifest.records)
    touched.insert({r.doc_id, r.sentence_index, r.token_index});
  CHECK(touched.size() == manifest.records.size());  // positions unique

  for (std::size_t d = 0; d < docs.size(); ++d) {
    REQUIRE(corrupted[d].sentences.size() == docs[d].sentences.size());
    for (std::size_t s = 0; s < docs[d].sentences.size(); ++s) {
      const auto& before = docs[d].sentences[s].tokens;
      const auto& after = corrupted[d].sentences[s].tokens;
      REQUIRE(after.size() == before.size());
      for (std::size_t t = 0; t < before.size(); ++t) {
        bool hit = touched.count({docs[d].id, static_cast<int>(s),
                                  static_cast<int>(t)}) > 0;
        CHECK(after[t].label == (hit ? 1 : 0));
        if (!hit) CHECK(after[t].surface == before[t].surface);
        if (hit) {
          CHECK(after[t].surface != before[t].surface);
          CHECK(vocab.contains(after[t].lower));
          CHECK(is_plural(after[t].lower) == is_plural(before[t].lower));
          CHECK(static_cast<bool>(std::isupper(
                    static_cast<unsigned char>(after[t].surface[0]))) ==
                static_cast<bool>(std::isupper(
                    static_cast<unsigned char>(before[t].surface[0]))));
        }
      }
    }
  }
}

TEST_CASE("manifest replay reproduces the corrupted corpus") {
  auto docs = fixture_corpus(5, 14);
  Vocabulary vocab = build_vocab(docs, 100);
  auto [corrupted, manifest] = corrupt_corpus(docs, vocab, 10, 50, 11);
  auto replayed = replay(manifest, docs);
  CHECK(flatten(replayed) == flatten(corrupted));

  // partial clean corpus -> error listing the missing document
  std::vector<Document> partial(docs.begin() + 1, docs.end());
  CHECK_THROWS_WITH_AS(replay(manifest, partial),
                       doctest::Contains(docs[0].id.c_str()), DataError);

  // mismatched original surface -> error
  auto broken = docs;
  const auto& rec = manifest.records.front();
  broken[0].sentences[rec.sentence_index].tokens[rec.token_index].surface +=
      "x";
  if (broken[0].id == rec.doc_id)
    CHECK_THROWS_AS(replay(manifest, broken), DataError);
}

TEST_CASE("candidate selection frequency is near uniform over seeds") {
  auto docs = fixture_corpus(1, 14);
  Vocabulary vocab = build_vocab(docs, 100);
  auto candidates = select_candidates(docs[0], vocab);
  REQUIRE(candidates.size() > 10);

  const int runs = 200;
  const int rate = 3;
  std::map<std::pair<int, int>, int> hits;
  for (int seed = 0; seed < runs; ++seed) {
    auto [corrupted, manifest] = corrupt_corpus(docs, vocab, rate, 50, seed);
    for (const auto& r : manifest.records)
      ++hits[{r.sentence_index, r.token_index}];
  }
  double p = static_cast<double>(rate) / candidates.size();
  double sd = std::sqrt(runs * p * (1 - p));
  for (const auto& pos : candidates) {
    double observed = hits[pos];
    CHECK(std::abs(observed - runs * p) <= 5 * sd);
  }
}

TEST_CASE("split is a seeded 60/20/20 partition") {
  auto docs = fixture_corpus(10, 12);
  Splits s1 = split_corpus(docs, 21);
  Splits s2 = split_corpus(docs, 21);
  CHECK(s1.train.size() == 6);
  CHECK(s1.dev.size() == 2);
  CHECK(s1.test.size() == 2);

  std::set<std::string> all;
  auto collect = [&](const std::vector<Document>& v) {
    for (const auto& d : v) CHECK(all.insert(d.id).second);  // disjoint
  };
  collect(s1.train);
  collect(s1.dev);
  collect(s1.test);
  CHECK(all.size() == docs.size());
  CHECK(flatten(s1.train) == flatten(s2.train));

  std::vector<Document> few(docs.begin(), docs.begin() + 4);
  CHECK_THROWS_AS(split_corpus(few, 0), ContractError);
}

TEST_CASE("vocabulary keeps the most frequent types") {
  Document doc = tokenize("d", "a a a b b c\n");
  std::vector<Document> train = {doc};
  Vocabulary vocab = build_vocab(train, 2);
  CHECK(vocab.size() == Vocabulary::kReserved + 2);
  CHECK(vocab.contains("a"));
  CHECK(vocab.contains("b"));
  CHECK(vocab.id_of("c") == Vocabulary::kUnk);
  CHECK(vocab.rank_of("a") == 1);
  CHECK(vocab.rank_of("b") == 2);
  CHECK_THROWS_AS(build_vocab(train, 0), ContractError);
}

TEST_CASE("vocabulary round trip and fingerprint") {
  auto docs = fixture_corpus(3, 12);
  Vocabulary vocab = build_vocab(docs, 40);
  auto tmp = std::filesystem::temp_directory_path() / "ooc_vocab_test.tsv";
  vocab.save(tmp);
  Vocabulary loaded = Vocabulary::load(tmp);
  CHECK(loaded.size() == vocab.size());
  CHECK(loaded.fingerprint() == vocab.fingerprint());
  CHECK(loaded.rank_of("the") == vocab.rank_of("the"));
  std::filesystem::remove(tmp);

  Vocabulary other = build_vocab(docs, 10);
  CHECK(other.fingerprint() != vocab.fingerprint());
}

TEST_CASE("manifest file round trip") {
  CorruptionManifest m;
  m.seed = 42;
  m.rate = 10;
  m.window_k = 50;
  m.records.push_back({"doc1", 3, 7, "engineering", "performance"});
  m.records.push_back({"doc2", 0, 1, "Books", "Chairs"});
  auto tmp = std::filesystem::temp_directory_path() / "ooc_manifest_test.tsv";
  m.save(tmp);
  CorruptionManifest loaded = CorruptionManifest::load(tmp);
  CHECK(loaded.seed == 42);
  CHECK(loaded.rate == 10);
  CHECK(loaded.window_k == 50);
  REQUIRE(loaded.records.size() == 2);
  CHECK(loaded.records[0].original == "engineering");
  CHECK(loaded.records[1].replacement == "Chairs");
  std::filesystem::remove(tmp);
}

TEST_CASE("parallel ingestion requires aligned line counts") {
  auto dir = std::filesystem::temp_directory_path();
  auto src = dir / "ooc_par_src.txt";
  auto tgt = dir / "ooc_par_tgt.txt";
  std::ofstream(src) << "one two\nthree\nfour five six\n";
  std::ofstream(tgt) << "eins zwei\ndrei\nvier funf sechs\n";
  auto pairs = ingest_parallel(src, tgt);
  CHECK(pairs.size() == 3);
  CHECK(pairs[2].first.tokens.size() == 3);

  std::ofstream(tgt) << "eins\nzwei\ndrei\nvier\n";
  CHECK_THROWS_WITH_AS(ingest_parallel(src, tgt), doctest::Contains("3"),
                       DataError);

  std::ofstream(src) << "";
  std::ofstream(tgt) << "";
  CHECK(ingest_parallel(src, tgt).empty());
  std::filesystem::remove(src);
  std::filesystem::remove(tgt);
}

TEST_CASE("corpus directory round trip") {
  auto docs = fixture_corpus(3, 12);
  auto dir = std::filesystem::temp_directory_path() / "ooc_corpus_test";
  std::filesystem::remove_all(dir);
  save_corpus_dir(docs, dir);
  auto loaded = load_corpus_dir(dir);
  REQUIRE(loaded.size() == docs.size());
  for (auto& d : loaded) pos_tag(d);
  CHECK(flatten(loaded) == flatten(docs));
  std::filesystem::remove_all(dir);

  CHECK_THROWS_AS(load_corpus_dir(dir / "missing"), DataError);
}
