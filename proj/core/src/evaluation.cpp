#include "ooc/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

namespace ooc {

namespace {

std::vector<int> sentence_ids(const Sentence& s) {
  std::vector<int> ids;
  ids.reserve(s.tokens.size());
  for (const Token& t : s.tokens) ids.push_back(t.vocab_id);
  return ids;
}

// Shared per-document walk; `scorer` maps a sentence to one value per token.
template <class Scorer>
std::vector<TokenScore> score_docs(Model& model,
                                   const std::vector<Document>& docs,
                                   bool force_zero_context, Scorer scorer) {
  std::vector<TokenScore> out;
  bool contextual = is_contextual(model.cfg.topology) && !force_zero_context;
  for (const Document& doc : docs) {
    std::vector<Tensor> reprs;
    if (contextual) reprs = sentence_reprs(*model.sentenc, doc);
    for (const Sentence& sent : doc.sentences) {
      std::vector<double> vals = scorer(doc, reprs, sent, contextual);
      if (vals.size() != sent.tokens.size())
        throw ContractError("scoring: unscored positions in " + doc.id);
      for (std::size_t i = 0; i < vals.size(); ++i)
        out.push_back({doc.id, sent.index, static_cast<int>(i), vals[i],
                       sent.tokens[i].label});
    }
  }
  return out;
}

}  // namespace

std::vector<TokenScore> score_lm(Model& model,
                                 const std::vector<Document>& docs,
                                 bool force_zero_context) {
  if (is_supervised(model.cfg.topology))
    throw ContractError("score_lm: model is supervised");
  bool attention = uses_attention(model.cfg.topology);
  return score_docs(
      model, docs, force_zero_context,
      [&](const Document&, const std::vector<Tensor>& reprs,
          const Sentence& sent, bool contextual) {
        std::vector<int> ids = sentence_ids(sent);
        if (attention && contextual) {
          auto memory = context_memory(model, reprs, sent.index);
          return attn_lm_token_nll(model, ids, memory);
        }
        Tensor h0;  // undefined = zero state
        if (contextual) h0 = encode_context(model, reprs, sent.index).c;
        if (attention && !contextual) {
          std::vector<Tensor> zero_mem{Tensor::zeros(1, model.cfg.hidden_dim)};
          return attn_lm_token_nll(model, ids, zero_mem);
        }
        return lm_token_nll(model, ids, h0);
      });
}

std::vector<TokenScore> score_binclass(Model& model,
                                       const std::vector<Document>& docs,
                                       bool force_zero_context) {
  if (!is_supervised(model.cfg.topology))
    throw ContractError("score_binclass: model is unsupervised");
  return score_docs(model, docs, force_zero_context,
                    [&](const Document&, const std::vector<Tensor>& reprs,
                        const Sentence& sent, bool contextual) {
                      Tensor h0;
                      if (contextual)
                        h0 = encode_context(model, reprs, sent.index).c;
                      return binclass_token_prob(model, sentence_ids(sent), h0);
                    });
}

std::vector<TokenScore> score_model(Model& model,
                                    const std::vector<Document>& docs,
                                    bool force_zero_context) {
  return is_supervised(model.cfg.topology)
             ? score_binclass(model, docs, force_zero_context)
             : score_lm(model, docs, force_zero_context);
}

namespace {

void sort_scores(std::vector<TokenScore>& scores) {
  std::sort(scores.begin(), scores.end(),
            [](const TokenScore& a, const TokenScore& b) {
              if (a.score != b.score) return a.score > b.score;
              if (a.doc_id != b.doc_id) return a.doc_id < b.doc_id;
              if (a.sentence_index != b.sentence_index)
                return a.sentence_index < b.sentence_index;
              return a.token_index < b.token_index;
            });
}

SweepPoint point_at(const std::vector<std::size_t>& tp_prefix,
                    std::size_t gold_total, std::size_t t) {
  SweepPoint p;
  p.threshold = t;
  std::size_t tp = tp_prefix[t];
  p.precision = static_cast<double>(tp) / static_cast<double>(t);
  p.recall = static_cast<double>(tp) / static_cast<double>(gold_total);
  p.f_score = (p.precision + p.recall) == 0.0
                  ? 0.0
                  : 2.0 * p.precision * p.recall / (p.precision + p.recall);
  return p;
}

}  // namespace

SweepCurve sweep(std::vector<TokenScore> scores,
                 const std::vector<std::size_t>* thresholds) {
  if (scores.empty()) throw ContractError("sweep: empty score list");
  std::size_t gold_total = 0;
  for (const TokenScore& s : scores) gold_total += s.gold ? 1 : 0;
  if (gold_total == 0)
    throw ContractError("sweep: no gold positives in the dataset");
  sort_scores(scores);
  std::vector<std::size_t> tp_prefix(scores.size() + 1, 0);
  for (std::size_t i = 0; i < scores.size(); ++i)
    tp_prefix[i + 1] = tp_prefix[i] + (scores[i].gold ? 1 : 0);

  std::vector<std::size_t> ts;
  if (thresholds) {
    ts = *thresholds;
    for (std::size_t t : ts)
      if (t < 1 || t > scores.size())
        throw ContractError("sweep: threshold " + std::to_string(t) +
                            " outside [1," + std::to_string(scores.size()) +
                            "]");
  } else {
    ts.resize(scores.size());
    for (std::size_t i = 0; i < ts.size(); ++i) ts[i] = i + 1;
  }

  SweepCurve curve;
  curve.points.reserve(ts.size());
  bool first = true;
  for (std::size_t t : ts) {
    SweepPoint p = point_at(tp_prefix, gold_total, t);
    if (first || p.f_score > curve.chosen.f_score ||
        (p.f_score == curve.chosen.f_score && t < curve.chosen.threshold)) {
      curve.chosen = p;
      first = false;
    }
    curve.points.push_back(p);
  }
  return curve;
}

double perplexity(Model& model, const std::vector<Document>& docs) {
  if (is_supervised(model.cfg.topology))
    throw ContractError("perplexity: model is supervised");
  auto scores = score_lm(model, docs);
  if (scores.empty()) throw ContractError("perplexity: empty dataset");
  double total = 0.0;
  for (const TokenScore& s : scores) total += s.score;
  return std::exp(total / static_cast<double>(scores.size()));
}

EvalReport evaluate(Model& model, const std::vector<Document>& dev,
                    const std::vector<Document>& test,
                    const std::vector<std::size_t>* thresholds) {
  EvalReport report;
  report.model_name = to_string(model.cfg.topology);
  if (model.cfg.sentence_repr != SentRepr::None)
    report.model_name += "+" + to_string(model.cfg.sentence_repr);

  auto dev_scores = score_model(model, dev);
  auto test_scores = score_model(model, test);
  report.dev_curve = sweep(dev_scores, thresholds);
  report.dev_threshold = report.dev_curve.chosen.threshold;

  // Fig-3 style thresholds are absolute dev word counts; transfer to test by
  // proportional rescaling.
  double ratio = static_cast<double>(test_scores.size()) /
                 static_cast<double>(dev_scores.size());
  auto t_test = static_cast<std::size_t>(
      std::llround(static_cast<double>(report.dev_threshold) * ratio));
  t_test = std::clamp<std::size_t>(t_test, 1, test_scores.size());
  report.test_threshold = t_test;

  std::size_t gold_total = 0;
  for (const TokenScore& s : test_scores) gold_total += s.gold ? 1 : 0;
  if (gold_total == 0)
    throw ContractError("evaluate: no gold positives in the test set");
  sort_scores(test_scores);
  std::vector<std::size_t> tp_prefix(test_scores.size() + 1, 0);
  for (std::size_t i = 0; i < test_scores.size(); ++i)
    tp_prefix[i + 1] = tp_prefix[i] + (test_scores[i].gold ? 1 : 0);
  report.test_point = point_at(tp_prefix, gold_total, t_test);

  if (!is_supervised(model.cfg.topology)) {
    report.has_perplexity = true;
    report.perplexity = perplexity(model, test);
  }
  return report;
}

void write_report(const std::filesystem::path& file,
                  const EvalReport& report) {
  std::ofstream os(file);
  if (!os) throw DataError("cannot write " + file.string());
  os << "model\tperplexity\tprecision\trecall\tf_score\n";
  os.precision(10);
  os << report.model_name << '\t';
  if (report.has_perplexity)
    os << report.perplexity;
  else
    os << '-';
  os << '\t' << report.test_point.precision << '\t' << report.test_point.recall
     << '\t' << report.test_point.f_score << '\n';
}

void write_sweep(const std::filesystem::path& file, const SweepCurve& curve) {
  std::ofstream os(file);
  if (!os) throw DataError("cannot write " + file.string());
  os << "threshold\tprecision\trecall\tf_score\n";
  os.precision(10);
  for (const SweepPoint& p : curve.points)
    os << p.threshold << '\t' << p.precision << '\t' << p.recall << '\t'
       << p.f_score << '\n';
}

}  // namespace ooc
