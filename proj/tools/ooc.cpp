#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>

#include "ooc/corpus.hpp"
#include "ooc/evaluation.hpp"
#include "ooc/models.hpp"
#include "ooc/synth.hpp"
#include "ooc/training.hpp"

namespace fs = std::filesystem;

namespace {

// Every run drops its fully resolved configuration next to its outputs so the
// exact invocation can be replayed later.
void write_resolved(const CLI::App* sub, const fs::path& where) {
  fs::create_directories(where.parent_path().empty() ? "."
                                                     : where.parent_path());
  std::ofstream os(where);
  if (!os) throw ooc::DataError("cannot write " + where.string());
  os << sub->config_to_str(true, false);
}

std::vector<ooc::Document> load_tagged(const fs::path& dir) {
  auto docs = ooc::load_corpus_dir(dir);
  if (docs.empty()) throw ooc::DataError("empty corpus directory: " + dir.string());
  for (auto& d : docs) ooc::pos_tag(d);
  return docs;
}

struct CorruptArgs {
  fs::path corpus, out;
  int rate = 10;
  int k = 50;
  std::uint64_t seed = 0;
  std::size_t vocab_size = 30000;
};

void run_corrupt(const CorruptArgs& a) {
  auto docs = load_tagged(a.corpus);
  ooc::filter_dataset(docs);
  if (docs.empty())
    throw ooc::DataError("no documents survive filtering in " + a.corpus.string());
  auto vocab = ooc::build_vocab(docs, a.vocab_size);
  auto [corrupted, manifest] =
      ooc::corrupt_corpus(docs, vocab, a.rate, a.k, a.seed);
  fs::create_directories(a.out);
  ooc::save_corpus_dir(corrupted, a.out / "corpus");
  manifest.save(a.out / "manifest.tsv");
  vocab.save(a.out / "vocab.tsv");
}

struct VocabArgs {
  fs::path train, out;
  std::size_t size = 30000;
};

void run_vocab(const VocabArgs& a) {
  auto docs = ooc::load_corpus_dir(a.train);
  if (docs.empty()) throw ooc::DataError("empty corpus directory: " + a.train.string());
  ooc::build_vocab(docs, a.size).save(a.out);
}

struct PretrainArgs {
  std::string mode = "lm";
  fs::path train, source, target, vocab_file, out;
  ooc::PretrainConfig cfg;
  std::size_t target_vocab_size = 30000;
};

void run_pretrain(const PretrainArgs& a) {
  auto vocab = ooc::Vocabulary::load(a.vocab_file);
  ooc::SentenceEncoder enc;
  if (a.mode == "lm") {
    if (a.train.empty()) throw ooc::ContractError("--train is required in lm mode");
    auto docs = ooc::load_corpus_dir(a.train);
    if (docs.empty()) throw ooc::DataError("empty corpus directory: " + a.train.string());
    ooc::apply_vocab(docs, vocab);
    enc = ooc::pretrain_sentenc_lm(docs, vocab, a.cfg);
  } else {
    if (a.source.empty() || a.target.empty())
      throw ooc::ContractError("--source and --target are required in nmt mode");
    auto pairs = ooc::ingest_parallel(a.source, a.target);
    // target side keeps its own vocabulary, built from the target lines
    std::vector<ooc::Document> tgt_doc(1);
    tgt_doc[0].id = "target";
    for (auto& [src, tgt] : pairs) tgt_doc[0].sentences.push_back(tgt);
    auto target_vocab = ooc::build_vocab(tgt_doc, a.target_vocab_size);
    for (auto& [src, tgt] : pairs) {
      ooc::apply_vocab(src, vocab);
      ooc::apply_vocab(tgt, target_vocab);
    }
    enc = ooc::pretrain_sentenc_nmt(pairs, vocab, target_vocab, a.cfg);
  }
  ooc::encoder_to_checkpoint(enc).save(a.out);
}

struct TrainArgs {
  std::string topology = "baseline-lm";
  fs::path sentenc, train, dev, vocab_file, manifest, out;
  std::size_t embed_dim = 64;
  std::size_t hidden_dim = 512;
  std::size_t context_window = 10;
  ooc::TrainConfig cfg;
};

void run_train(const TrainArgs& a) {
  ooc::Topology topo = ooc::parse_topology(a.topology);
  auto vocab = ooc::Vocabulary::load(a.vocab_file);
  auto train_docs = ooc::load_corpus_dir(a.train);
  auto dev_docs = ooc::load_corpus_dir(a.dev);
  ooc::apply_vocab(train_docs, vocab);
  ooc::apply_vocab(dev_docs, vocab);
  if (!a.manifest.empty()) {
    auto manifest = ooc::CorruptionManifest::load(a.manifest);
    ooc::apply_manifest_labels(train_docs, manifest);
    ooc::apply_manifest_labels(dev_docs, manifest);
  } else if (ooc::is_supervised(topo)) {
    throw ooc::ContractError("supervised topologies need --manifest for labels");
  }

  std::shared_ptr<ooc::SentenceEncoder> enc;
  if (ooc::is_contextual(topo)) {
    if (a.sentenc.empty())
      throw ooc::ContractError("contextual topologies need --sentenc");
    enc = std::make_shared<ooc::SentenceEncoder>(ooc::encoder_from_checkpoint(
        ooc::Checkpoint::load(a.sentenc), vocab.fingerprint()));
  }

  ooc::ModelConfig mc;
  mc.topology = topo;
  mc.sentence_repr = enc ? enc->tag : ooc::SentRepr::None;
  mc.embed_dim = a.embed_dim;
  mc.hidden_dim = a.hidden_dim;
  mc.vocab_size = vocab.size();
  mc.context_window = a.context_window;
  mc.seed = a.cfg.seed;
  mc.clip = a.cfg.clip;
  mc.validate();
  ooc::Model model(mc, enc);

  ooc::TrainResult result = ooc::train(model, train_docs, dev_docs, vocab, a.cfg);
  fs::path metrics = a.out.string() + ".metrics.tsv";
  fs::remove(metrics);  // keep re-runs bit-identical
  ooc::append_metrics_log(metrics, result.log);
  if (result.best_epoch >= 0) result.best.save(a.out);
  if (result.diverged)
    throw ooc::NumericError("training diverged (non-finite loss)");
}

struct EvalArgs {
  fs::path model, vocab_file, dev, test, manifest, out;
  std::vector<std::size_t> thresholds;
};

void run_eval(const EvalArgs& a) {
  auto vocab = ooc::Vocabulary::load(a.vocab_file);
  ooc::Model model =
      ooc::model_from_checkpoint(ooc::Checkpoint::load(a.model), vocab.fingerprint());
  auto dev = ooc::load_corpus_dir(a.dev);
  auto test = ooc::load_corpus_dir(a.test);
  ooc::apply_vocab(dev, vocab);
  ooc::apply_vocab(test, vocab);
  auto manifest = ooc::CorruptionManifest::load(a.manifest);
  ooc::apply_manifest_labels(dev, manifest);
  ooc::apply_manifest_labels(test, manifest);
  ooc::EvalReport report = ooc::evaluate(
      model, dev, test, a.thresholds.empty() ? nullptr : &a.thresholds);
  fs::create_directories(a.out);
  ooc::write_report(a.out / "report.tsv", report);
  ooc::write_sweep(a.out / "sweep.tsv", report.dev_curve);
}

struct ReplayArgs {
  fs::path manifest, clean, out;
};

void run_replay(const ReplayArgs& a) {
  auto manifest = ooc::CorruptionManifest::load(a.manifest);
  auto clean = ooc::load_corpus_dir(a.clean);
  if (clean.empty()) throw ooc::DataError("empty corpus directory: " + a.clean.string());
  auto corrupted = ooc::replay(manifest, clean);
  fs::create_directories(a.out);
  ooc::save_corpus_dir(corrupted, a.out / "corpus");
}

struct SplitArgs {
  fs::path corpus, out;
  std::uint64_t seed = 0;
};

void run_split(const SplitArgs& a) {
  auto docs = ooc::load_corpus_dir(a.corpus);
  if (docs.empty()) throw ooc::DataError("empty corpus directory: " + a.corpus.string());
  ooc::Splits splits = ooc::split_corpus(docs, a.seed);
  fs::create_directories(a.out);
  ooc::save_corpus_dir(splits.train, a.out / "train");
  ooc::save_corpus_dir(splits.dev, a.out / "dev");
  ooc::save_corpus_dir(splits.test, a.out / "test");
}

struct SynthArgs {
  fs::path out;
  ooc::synth::SynthConfig cfg;
};

void run_synth(const SynthArgs& a) {
  auto corpus = ooc::synth::generate(a.cfg);
  fs::create_directories(a.out);
  ooc::save_corpus_dir(corpus.clean, a.out / "clean");
  ooc::save_corpus_dir(corpus.corrupted, a.out / "corpus");
  corpus.manifest.save(a.out / "manifest.tsv");
}

void add_config(CLI::App* sub) {
  // the config option lives on the root app; let it match after the
  // subcommand name too
  sub->fallthrough();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"out-of-context word detection toolkit"};
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();
  app.set_config("--config", "",
                 "sub.key = value config file; explicit flags win");
  app.allow_config_extras(false);

  CorruptArgs corrupt;
  auto* c = app.add_subcommand("corrupt", "insert out-of-context words into a corpus");
  add_config(c);
  c->add_option("--corpus", corrupt.corpus, "clean corpus directory")->required();
  c->add_option("--out", corrupt.out, "output directory")->required();
  c->add_option("--rate", corrupt.rate, "replacements per document");
  c->add_option("--k", corrupt.k, "appearance window radius (frequency ranks)");
  c->add_option("--seed", corrupt.seed, "random seed");
  c->add_option("--vocab-size", corrupt.vocab_size, "vocabulary size for candidate selection");
  c->callback([&] {
    run_corrupt(corrupt);
    write_resolved(&app, corrupt.out / "resolved.config");
  });

  VocabArgs vocab;
  auto* v = app.add_subcommand("vocab", "build a frequency vocabulary");
  add_config(v);
  v->add_option("--train", vocab.train, "training corpus directory")->required();
  v->add_option("--size", vocab.size, "kept word types");
  v->add_option("--out", vocab.out, "vocabulary file")->required();
  v->callback([&] {
    run_vocab(vocab);
    write_resolved(&app, vocab.out.string() + ".resolved.config");
  });

  PretrainArgs pretrain;
  auto* p = app.add_subcommand("pretrain", "pre-train a sentence encoder");
  add_config(p);
  p->add_option("--mode", pretrain.mode, "lm or nmt")
      ->check(CLI::IsMember({"lm", "nmt"}));
  p->add_option("--train", pretrain.train, "corpus directory (lm mode)");
  p->add_option("--source", pretrain.source, "source sentences file (nmt mode)");
  p->add_option("--target", pretrain.target, "target sentences file (nmt mode)");
  p->add_option("--vocab", pretrain.vocab_file, "source-side vocabulary file")->required();
  p->add_option("--target-vocab-size", pretrain.target_vocab_size, "target vocabulary size (nmt)");
  p->add_option("--embed-dim", pretrain.cfg.embed_dim, "embedding dimension");
  p->add_option("--hidden-dim", pretrain.cfg.hidden_dim, "hidden units");
  p->add_option("--epochs", pretrain.cfg.epochs, "training epochs");
  p->add_option("--batch", pretrain.cfg.batch_size, "batch size");
  p->add_option("--lr", pretrain.cfg.lr, "Adam learning rate");
  p->add_option("--seed", pretrain.cfg.seed, "random seed");
  p->add_option("--out", pretrain.out, "encoder checkpoint file")->required();
  p->callback([&] {
    run_pretrain(pretrain);
    write_resolved(&app, pretrain.out.string() + ".resolved.config");
  });

  TrainArgs train;
  auto* t = app.add_subcommand("train", "train a detection model");
  add_config(t);
  t->add_option("--topology", train.topology,
                "baseline-lm | baseline-binclass | context-lm | "
                "context-attn-lm | context-binclass")
      ->required();
  t->add_option("--sentenc", train.sentenc, "frozen sentence-encoder checkpoint");
  t->add_option("--train", train.train, "training split directory")->required();
  t->add_option("--dev", train.dev, "development split directory")->required();
  t->add_option("--vocab", train.vocab_file, "vocabulary file")->required();
  t->add_option("--manifest", train.manifest, "corruption manifest (labels)");
  t->add_option("--embed-dim", train.embed_dim, "embedding dimension");
  t->add_option("--hidden-dim", train.hidden_dim, "hidden units");
  t->add_option("--context-window", train.context_window, "preceding sentences in C");
  t->add_option("--epochs", train.cfg.epochs, "training epochs");
  t->add_option("--batch", train.cfg.batch_size, "batch size");
  t->add_option("--lr", train.cfg.lr, "Adam learning rate");
  t->add_flag("--clip", train.cfg.clip, "L2 gradient clipping at norm 5");
  t->add_option("--seed", train.cfg.seed, "random seed");
  t->add_option("--out", train.out, "model checkpoint file")->required();
  t->callback([&] {
    run_train(train);
    write_resolved(&app, train.out.string() + ".resolved.config");
  });

  EvalArgs eval;
  auto* e = app.add_subcommand("eval", "evaluate a trained model");
  add_config(e);
  e->add_option("--model", eval.model, "model checkpoint file")->required();
  e->add_option("--vocab", eval.vocab_file, "vocabulary file")->required();
  e->add_option("--dev", eval.dev, "development split directory")->required();
  e->add_option("--test", eval.test, "test split directory")->required();
  e->add_option("--manifest", eval.manifest, "corruption manifest (gold labels)")->required();
  e->add_option("--thresholds", eval.thresholds, "explicit threshold list")
      ->delimiter(',');
  e->add_option("--out", eval.out, "output directory")->required();
  e->callback([&] {
    run_eval(eval);
    write_resolved(&app, eval.out / "resolved.config");
  });

  ReplayArgs replay;
  auto* r = app.add_subcommand("replay", "re-apply a corruption manifest");
  add_config(r);
  r->add_option("--manifest", replay.manifest, "corruption manifest")->required();
  r->add_option("--clean", replay.clean, "clean corpus directory")->required();
  r->add_option("--out", replay.out, "output directory")->required();
  r->callback([&] {
    run_replay(replay);
    write_resolved(&app, replay.out / "resolved.config");
  });

  SplitArgs split;
  auto* s = app.add_subcommand("split", "60/20/20 document split");
  add_config(s);
  s->add_option("--corpus", split.corpus, "corpus directory")->required();
  s->add_option("--seed", split.seed, "random seed");
  s->add_option("--out", split.out, "output directory")->required();
  s->callback([&] {
    run_split(split);
    write_resolved(&app, split.out / "resolved.config");
  });

  SynthArgs synth;
  auto* y = app.add_subcommand("synth", "generate a synthetic topic-marker corpus");
  add_config(y);
  y->add_option("--docs", synth.cfg.docs, "document count");
  y->add_option("--topics", synth.cfg.topics, "latent topic count");
  y->add_option("--nouns-per-topic", synth.cfg.nouns_per_topic, "topic noun inventory size");
  y->add_option("--rate", synth.cfg.replacements_per_doc, "substitutions per document");
  y->add_option("--seed", synth.cfg.seed, "random seed");
  y->add_option("--out", synth.out, "output directory")->required();
  y->callback([&] {
    run_synth(synth);
    write_resolved(&app, synth.out / "resolved.config");
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  } catch (const ooc::NumericError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const ooc::ContractError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
