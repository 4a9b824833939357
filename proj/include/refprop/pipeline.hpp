#pragma once

#include <cstdio>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "refprop/applications.hpp"
#include "refprop/category.hpp"
#include "refprop/corpus.hpp"
#include "refprop/errors.hpp"
#include "refprop/evaluation.hpp"
#include "refprop/manual_scorer.hpp"
#include "refprop/maxent.hpp"
#include "refprop/rules.hpp"

namespace refprop {

/// Conflict resolver used while decoding: hand-scored aggregation or a
/// trained model.
struct Decider {
  const MaxEntModel* model = nullptr;  // nullptr = manual scoring

  static Decider manual() { return {}; }
  static Decider with_model(const MaxEntModel& m) { return {&m}; }

  bool is_model() const { return model != nullptr; }
};

struct AnnotatedNP {
  NPContext context;
  Category predicted = Category::indefinite;
  bool defaulted = false;
  std::vector<std::string> fired;  // rule ids, rule-set order
  std::optional<ScoreTriple> manual_score;           // manual decider only
  std::optional<PerCategory<double>> probabilities;  // model decider only
};

struct AnnotatedDocument {
  std::string doc_id;
  std::vector<AnnotatedNP> nps;
};

/// Errors unless the model was trained against exactly this rule set
/// (same feature ids, same order).
inline void check_compatible(const MaxEntModel& model, const RuleSet& rules) {
  if (model.feature_index() != rules.ids())
    throw DataError(
        "model/ruleset feature mismatch: the model was trained on a different "
        "rule set");
}

/// Annotates one document left to right. After each decision the discourse
/// store is updated, so dynamic rule conditions for later NPs see the labels
/// already assigned. Predictions for an NP therefore never depend on later
/// NPs.
inline AnnotatedDocument annotate_document(const Document& doc,
                                           const RuleSet& rules,
                                           const Decider& decider) {
  if (decider.is_model()) check_compatible(*decider.model, rules);

  AnnotatedDocument out;
  out.doc_id = doc.doc_id;
  out.nps.reserve(doc.nps.size());
  DiscourseStore store;

  for (const NPContext& np : doc.nps) {
    AnnotatedNP ann;
    ann.context = np;
    ann.fired = fire_rules(np, store, rules);
    if (decider.is_model()) {
      const MLDecision decision = decide_ml(*decider.model, ann.fired);
      ann.predicted = decision.category;
      ann.defaulted = decision.defaulted;
      ann.probabilities = decision.probabilities;
    } else {
      const ScoreTriple triple = aggregate(gather_rules(rules, ann.fired));
      const ManualDecision decision = decide_manual(triple, !ann.fired.empty());
      ann.predicted = decision.category;
      ann.defaulted = decision.defaulted;
      ann.manual_score = triple;
    }
    store.assign(np.surface, ann.predicted, np.sentence_index);
    out.nps.push_back(std::move(ann));
  }
  return out;
}

inline std::vector<AnnotatedDocument> annotate_corpus(const Corpus& corpus,
                                                      const RuleSet& rules,
                                                      const Decider& decider) {
  std::vector<AnnotatedDocument> out;
  out.reserve(corpus.documents.size());
  for (const Document& doc : corpus.documents)
    out.push_back(annotate_document(doc, rules, decider));
  return out;
}

// --- report assembly ----------------------------------------------------------

/// Documents report under their group: the doc id up to the first '/', or the
/// whole id when there is no '/'. "turu/03" and "turu/07" share one section.
inline std::string doc_group(std::string_view doc_id) {
  const std::size_t slash = doc_id.find('/');
  return std::string(doc_id.substr(0, slash));
}

/// Scores annotated documents against their gold labels, one report section
/// per document group. Every NP must carry gold. Throws DataError otherwise.
inline Report build_report(const std::vector<AnnotatedDocument>& docs,
                           std::string title) {
  Report report;
  report.title = std::move(title);
  std::unordered_map<std::string, std::size_t> section_index;
  std::unordered_map<std::string, std::set<std::pair<std::string, int>>>
      sentences_seen;

  for (const AnnotatedDocument& doc : docs) {
    const std::string group = doc_group(doc.doc_id);
    auto [it, inserted] = section_index.try_emplace(group, report.sections.size());
    if (inserted) report.sections.push_back(ReportSection{group, 0, {}});
    ReportSection& section = report.sections[it->second];

    std::vector<std::pair<GoldLabel, Category>> pairs;
    pairs.reserve(doc.nps.size());
    for (const AnnotatedNP& np : doc.nps) {
      if (!np.context.gold)
        throw DataError("cannot score doc '" + doc.doc_id + "': np " +
                        std::to_string(np.context.np_index) +
                        " has no gold label");
      pairs.emplace_back(*np.context.gold, np.predicted);
      sentences_seen[group].insert({doc.doc_id, np.context.sentence_index});
    }
    section.counts.merge(score(pairs));
  }
  for (auto& section : report.sections)
    section.sentence_count = static_cast<int>(sentences_seen[section.name].size());
  return report;
}

// --- experiments ---------------------------------------------------------------

struct ExperimentResult {
  Report manual_report;
  Report ml1_report;
  Report ml2_report;
  MaxEntModel ml1;
  MaxEntModel ml2;
  PerCategory<int> ml2_factors{{1, 1, 1}};
  std::vector<std::string> diagnostics;  // skipped training NPs
};

/// Runs the three arms on a train/test split: manual scoring, a model trained
/// on raw frequencies (optimizes overall accuracy), and a model trained with
/// inverse-occurrence rebalancing (optimizes the per-category average).
/// Reports score the test corpus.
inline ExperimentResult run_experiment(const Corpus& train_corpus,
                                       const Corpus& test_corpus,
                                       const RuleSet& rules,
                                       const TrainConfig& config = {}) {
  for (const auto* corpus : {&train_corpus, &test_corpus}) {
    for (const Diagnostic& d : validate(*corpus, /*require_gold=*/true))
      throw DataError(d.message);
  }

  ExperimentResult result;
  CompiledEvents compiled = compile_events(train_corpus, rules);
  if (compiled.events.empty())
    throw DataError("no training events: every NP was skipped");
  result.diagnostics = std::move(compiled.diagnostics);

  TrainConfig ml1_config = config;
  ml1_config.rebalance = Rebalance::none();
  result.ml1 = train(compiled.events, rules, ml1_config);

  TrainConfig ml2_config = config;
  ml2_config.rebalance = Rebalance::automatic();
  result.ml2_factors = compute_rebalance_factors(compiled.events);
  result.ml2 = train(compiled.events, rules, ml2_config);

  result.manual_report = build_report(
      annotate_corpus(test_corpus, rules, Decider::manual()), "manual");
  result.ml1_report = build_report(
      annotate_corpus(test_corpus, rules, Decider::with_model(result.ml1)),
      "machine-learning 1");
  result.ml2_report = build_report(
      annotate_corpus(test_corpus, rules, Decider::with_model(result.ml2)),
      "machine-learning 2");
  return result;
}

// --- annotated corpus I/O -------------------------------------------------------

namespace detail {

inline std::string format_probability(double p) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", p);
  return buf;
}

}  // namespace detail

/// Corpus format plus the prediction keys: `pred=`, per-category
/// probabilities or manual scores, `fired=` (omitted when no rule fired),
/// `defaulted=`, and optionally `article=`.
inline std::string write_annotated(const std::vector<AnnotatedDocument>& docs,
                                   bool suggest_articles = false) {
  std::string out;
  for (const AnnotatedDocument& doc : docs) {
    out += "#doc " + doc.doc_id + "\n";
    for (const AnnotatedNP& np : doc.nps) {
      out += record_fields(np.context);
      out += "\tpred=";
      out += category_code(np.predicted);
      if (np.probabilities) {
        out += "\tp_indef=" +
               detail::format_probability((*np.probabilities)[Category::indefinite]);
        out += "\tp_def=" +
               detail::format_probability((*np.probabilities)[Category::definite]);
        out += "\tp_gen=" +
               detail::format_probability((*np.probabilities)[Category::generic]);
      }
      if (np.manual_score) {
        out += "\tv_indef=" +
               std::to_string(np.manual_score->value[Category::indefinite]);
        out += "\tv_def=" +
               std::to_string(np.manual_score->value[Category::definite]);
        out += "\tv_gen=" +
               std::to_string(np.manual_score->value[Category::generic]);
        out += "\tposs=";
        for (Category c : kAllCategories)
          out += np.manual_score->possibility[c] ? '1' : '0';
      }
      if (!np.fired.empty()) {
        out += "\tfired=";
        for (std::size_t i = 0; i < np.fired.size(); ++i) {
          if (i) out += ',';
          out += np.fired[i];
        }
      }
      out += "\tdefaulted=";
      out += np.defaulted ? '1' : '0';
      if (suggest_articles) {
        out += "\tarticle=" +
               article_key(suggest_article(np.predicted, /*plural=*/false));
      }
      out += '\n';
    }
  }
  return out;
}

/// A parsed corpus whose records may carry predictions.
struct AnnotatedCorpus {
  Corpus corpus;
  // predictions[doc][np], nullopt when the record had no pred= key
  std::vector<std::vector<std::optional<Category>>> predictions;
};

/// Reads the corpus format, also accepting the annotation keys written by
/// write_annotated. Annotation values beyond `pred=` are validated and
/// discarded.
inline AnnotatedCorpus read_annotated_corpus(std::string_view text) {
  AnnotatedCorpus out;
  const auto handler = [&](std::string_view key, std::string_view value,
                           int line, std::size_t doc, std::size_t np) -> bool {
    const auto malformed = [&]() -> ParseError {
      return ParseError(line, "malformed value '" + std::string(value) +
                                  "' for key '" + std::string(key) + "'");
    };
    if (key == "pred") {
      auto c = category_from_code(value);
      if (!c) throw malformed();
      if (out.predictions.size() <= doc) out.predictions.resize(doc + 1);
      if (out.predictions[doc].size() <= np) out.predictions[doc].resize(np + 1);
      out.predictions[doc][np] = *c;
      return true;
    }
    if (key == "p_indef" || key == "p_def" || key == "p_gen") {
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
      if (ec != std::errc{} || ptr != value.data() + value.size())
        throw malformed();
      return true;
    }
    if (key == "v_indef" || key == "v_def" || key == "v_gen") {
      if (!detail::parse_int(value)) throw malformed();
      return true;
    }
    if (key == "poss") {
      if (value.size() != kCategoryCount) throw malformed();
      for (char ch : value) {
        if (ch != '0' && ch != '1') throw malformed();
      }
      return true;
    }
    if (key == "defaulted") {
      if (!detail::parse_flag(value)) throw malformed();
      return true;
    }
    if (key == "fired" || key == "article") return true;
    return false;
  };

  out.corpus = detail::parse_corpus_impl(text, handler);
  // Pad so predictions align with documents/nps even when keys were absent.
  out.predictions.resize(out.corpus.documents.size());
  for (std::size_t d = 0; d < out.corpus.documents.size(); ++d)
    out.predictions[d].resize(out.corpus.documents[d].nps.size());
  return out;
}

}  // namespace refprop
