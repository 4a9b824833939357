#pragma once

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "refprop/applications.hpp"
#include "refprop/corpus.hpp"
#include "refprop/errors.hpp"
#include "refprop/evaluation.hpp"
#include "refprop/maxent.hpp"
#include "refprop/pipeline.hpp"
#include "refprop/rules.hpp"

namespace refprop::cli {

/// Bad flag combinations that CLI11 cannot express declaratively.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write file '" + path + "'");
  out << content;
  if (!out) throw DataError("failed while writing '" + path + "'");
}

inline Corpus load_corpus_file(const std::string& path) {
  try {
    return parse_corpus(read_file(path));
  } catch (const ParseError& e) {
    throw DataError(path + ": " + e.what());
  }
}

inline AnnotatedCorpus load_annotated_file(const std::string& path) {
  try {
    return read_annotated_corpus(read_file(path));
  } catch (const ParseError& e) {
    throw DataError(path + ": " + e.what());
  }
}

inline RuleSet load_rules_file(const std::string& path) {
  try {
    return load_rules(read_file(path));
  } catch (const ParseError& e) {
    throw DataError(path + ": " + e.what());
  }
}

inline MaxEntModel load_model_file(const std::string& path) {
  try {
    return load_model(read_file(path));
  } catch (const ParseError& e) {
    throw DataError(path + ": " + e.what());
  }
}

inline Rebalance parse_rebalance(const std::string& text) {
  if (text == "none") return Rebalance::none();
  if (text == "auto") return Rebalance::automatic();
  const auto parts = refprop::detail::split(text, ',');
  if (parts.size() == kCategoryCount) {
    PerCategory<int> factors;
    bool ok = true;
    for (std::size_t i = 0; i < kCategoryCount; ++i) {
      auto v = refprop::detail::parse_int(parts[i]);
      if (!v || *v <= 0) {
        ok = false;
        break;
      }
      factors[kAllCategories[i]] = *v;
    }
    if (ok) return Rebalance::explicit_(factors);
  }
  throw UsageError("--rebalance expects 'auto', 'none', or three positive "
                   "integers 'I,I,I' (indef,def,gen)");
}

inline std::string factor_line(const PerCategory<int>& factors) {
  std::string out = "rebalance factors:";
  for (Category c : kAllCategories) {
    out += ' ';
    out += category_code(c);
    out += '=';
    out += std::to_string(factors[c]);
  }
  return out;
}

inline std::string fmt4(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

struct CommonTrainFlags {
  std::size_t max_iters = 500;
  double tol = 1e-4;
  double smoothing = 0.01;

  void attach(CLI::App* cmd) {
    cmd->add_option("--max-iters", max_iters,
                    "maximum scaling iterations (default 500)");
    cmd->add_option("--tol", tol,
                    "constraint gap tolerance (default 1e-4)")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--smoothing", smoothing,
                    "count smoothing epsilon (default 0.01)")
        ->check(CLI::NonNegativeNumber);
  }

  TrainConfig config() const {
    TrainConfig cfg;
    cfg.max_iterations = max_iters;
    cfg.constraint_tolerance = tol;
    cfg.smoothing = smoothing;
    return cfg;
  }
};

// --- subcommand bodies ----------------------------------------------------

inline void run_train(const std::string& corpus_path, const std::string& rules_path,
                      const std::string& rebalance_text,
                      const CommonTrainFlags& flags, const std::string& out_path,
                      std::ostream& err) {
  const RuleSet rules = load_rules_file(rules_path);
  const Corpus corpus = load_corpus_file(corpus_path);
  const auto diagnostics = validate(corpus, /*require_gold=*/true);
  if (!diagnostics.empty()) {
    for (const auto& d : diagnostics) err << "error: " << d.message << "\n";
    throw DataError(std::to_string(diagnostics.size()) +
                    " validation error(s) in '" + corpus_path + "'");
  }

  CompiledEvents compiled = compile_events(corpus, rules);
  for (const auto& note : compiled.diagnostics) err << "note: " << note << "\n";
  if (compiled.events.empty())
    throw DataError("no training events: every NP in '" + corpus_path +
                    "' was skipped");

  TrainConfig cfg = flags.config();
  cfg.rebalance = parse_rebalance(rebalance_text);
  if (cfg.rebalance.mode == Rebalance::Mode::automatic) {
    err << factor_line(compute_rebalance_factors(compiled.events)) << "\n";
  } else if (cfg.rebalance.mode == Rebalance::Mode::explicit_factors) {
    err << factor_line(cfg.rebalance.factors) << "\n";
  }

  const MaxEntModel model = train(compiled.events, rules, cfg);
  write_file(out_path, save_model(model));
  err << "trained " << model.feature_count() << " features on "
      << compiled.events.size() << " events in " << model.meta.iterations_run
      << " iterations (constraint gap " << fmt4(model.meta.final_constraint_gap)
      << "); model written to '" << out_path << "'\n";
}

inline void run_classify(const std::string& corpus_path,
                         const std::string& rules_path,
                         const std::string& decider_name,
                         const std::string& model_path, bool suggest_articles,
                         const std::string& out_path, std::ostream& err) {
  const RuleSet rules = load_rules_file(rules_path);
  const Corpus corpus = load_corpus_file(corpus_path);

  MaxEntModel model;
  Decider decider = Decider::manual();
  if (decider_name == "model") {
    if (model_path.empty())
      throw UsageError("--decider model requires --model <file>");
    model = load_model_file(model_path);
    decider = Decider::with_model(model);
  }

  const auto docs = annotate_corpus(corpus, rules, decider);
  write_file(out_path, write_annotated(docs, suggest_articles));
  err << "annotated " << corpus.np_count() << " NPs in "
      << corpus.documents.size() << " documents; output written to '"
      << out_path << "'\n";
}

inline void run_evaluate(const std::string& gold_path,
                         const std::string& pred_path,
                         const std::string& report_path, std::ostream& out) {
  const AnnotatedCorpus gold = load_annotated_file(gold_path);
  const AnnotatedCorpus pred = load_annotated_file(pred_path);

  if (gold.corpus.documents.size() != pred.corpus.documents.size())
    throw DataError("gold and prediction files have different document counts");

  std::vector<AnnotatedDocument> docs;
  for (std::size_t d = 0; d < gold.corpus.documents.size(); ++d) {
    const Document& gdoc = gold.corpus.documents[d];
    const Document& pdoc = pred.corpus.documents[d];
    if (gdoc.doc_id != pdoc.doc_id)
      throw DataError("document id mismatch: '" + gdoc.doc_id + "' vs '" +
                      pdoc.doc_id + "'");
    if (gdoc.nps.size() != pdoc.nps.size())
      throw DataError("document '" + gdoc.doc_id + "' has " +
                      std::to_string(gdoc.nps.size()) + " NPs in the gold file "
                      "but " + std::to_string(pdoc.nps.size()) +
                      " in the prediction file");

    AnnotatedDocument doc;
    doc.doc_id = gdoc.doc_id;
    for (std::size_t i = 0; i < gdoc.nps.size(); ++i) {
      const NPContext& gnp = gdoc.nps[i];
      const NPContext& pnp = pdoc.nps[i];
      if (gnp.surface != pnp.surface)
        throw DataError("surface mismatch in document '" + gdoc.doc_id +
                        "', np " + std::to_string(i) + ": '" + gnp.surface +
                        "' vs '" + pnp.surface + "'");

      // Gold side: gold= key, falling back to the record's own prediction.
      std::optional<GoldLabel> gold_label = gnp.gold;
      if (!gold_label && gold.predictions[d][i])
        gold_label = GoldLabel::of(*gold.predictions[d][i]);
      if (!gold_label)
        throw DataError("document '" + gdoc.doc_id + "', np " +
                        std::to_string(i) + ": no gold label in '" + gold_path +
                        "'");

      // Prediction side: pred= key, falling back to an unambiguous gold=.
      std::optional<Category> predicted = pred.predictions[d][i];
      if (!predicted && pnp.gold && !pnp.gold->other)
        predicted = pnp.gold->category;
      if (!predicted)
        throw DataError("document '" + pdoc.doc_id + "', np " +
                        std::to_string(i) + ": no prediction in '" + pred_path +
                        "'");

      AnnotatedNP ann;
      ann.context = gnp;
      ann.context.gold = gold_label;
      ann.predicted = *predicted;
      doc.nps.push_back(std::move(ann));
    }
    docs.push_back(std::move(doc));
  }

  const Report report = build_report(docs, "evaluation");
  out << render_table(report);
  if (!report_path.empty()) write_file(report_path, write_summary(report));
}

inline void run_inspect(const std::string& model_path,
                        const std::string& feature, std::ostream& out) {
  const MaxEntModel model = load_model_file(model_path);
  std::vector<std::string> ids;
  if (!feature.empty()) {
    ids.push_back(feature);
  } else {
    ids = model.feature_index();
  }
  for (const auto& id : ids) {
    const auto p = per_feature_conditional(model, id);
    out << id << "\tindef " << fmt4(p[Category::indefinite]) << "\tdef "
        << fmt4(p[Category::definite]) << "\tgen " << fmt4(p[Category::generic])
        << "\n";
  }
}

inline void run_experiment_cmd(const std::string& train_path,
                               const std::string& test_path,
                               const std::string& rules_path,
                               const CommonTrainFlags& flags, std::ostream& out,
                               std::ostream& err) {
  const RuleSet rules = load_rules_file(rules_path);
  const Corpus train_corpus = load_corpus_file(train_path);
  const Corpus test_corpus = load_corpus_file(test_path);

  const ExperimentResult result =
      run_experiment(train_corpus, test_corpus, rules, flags.config());

  if (!result.diagnostics.empty())
    err << "note: " << result.diagnostics.size()
        << " training NP(s) skipped (gold 'other' or no rules fired)\n";
  err << factor_line(result.ml2_factors) << "\n";
  err << "ml1: " << result.ml1.meta.iterations_run
      << " iterations (constraint gap "
      << fmt4(result.ml1.meta.final_constraint_gap) << ")\n";
  err << "ml2: " << result.ml2.meta.iterations_run
      << " iterations (constraint gap "
      << fmt4(result.ml2.meta.final_constraint_gap) << ")\n";

  out << render_table(result.manual_report) << "\n";
  out << render_table(result.ml1_report) << "\n";
  out << render_table(result.ml2_report);
}

}  // namespace detail

/// Routes argv (without the program name) to a subcommand. Exit codes:
/// 0 success, 1 usage error, 2 data or validation error, 3 training error.
inline int dispatch(std::vector<std::string> args, std::ostream& out,
                    std::ostream& err) {
  CLI::App app{"referential property estimation for Japanese noun phrases"};
  app.name("refprop");
  app.require_subcommand(1);

  // train
  auto* train_cmd = app.add_subcommand(
      "train", "train a maxent conflict resolver from a gold-labeled corpus");
  std::string train_corpus, train_rules, train_out;
  std::string rebalance_text = "none";
  detail::CommonTrainFlags train_flags;
  train_cmd->add_option("--corpus", train_corpus, "gold-labeled corpus file")
      ->required();
  train_cmd->add_option("--rules", train_rules, "rule file")->required();
  train_cmd->add_option("--rebalance", rebalance_text,
                        "auto, none, or explicit factors I,I,I (default none)");
  train_flags.attach(train_cmd);
  train_cmd->add_option("--out", train_out, "output model file")->required();

  // classify
  auto* classify_cmd =
      app.add_subcommand("classify", "annotate a corpus with predicted "
                                     "referential properties");
  std::string cls_corpus, cls_rules, cls_model, cls_out;
  std::string cls_decider = "manual";
  bool cls_articles = false;
  classify_cmd->add_option("--corpus", cls_corpus, "corpus file")->required();
  classify_cmd->add_option("--rules", cls_rules, "rule file")->required();
  classify_cmd
      ->add_option("--decider", cls_decider,
                   "conflict resolver: manual or model (default manual)")
      ->check(CLI::IsMember({"manual", "model"}));
  classify_cmd->add_option("--model", cls_model,
                           "model file (required with --decider model)");
  classify_cmd->add_flag("--suggest-articles", cls_articles,
                         "append an article= key to each record");
  classify_cmd->add_option("--out", cls_out, "output annotated corpus file")
      ->required();

  // evaluate
  auto* eval_cmd = app.add_subcommand(
      "evaluate", "score a prediction file against gold labels");
  std::string eval_gold, eval_pred, eval_report;
  eval_cmd->add_option("--gold", eval_gold, "gold corpus file")->required();
  eval_cmd->add_option("--pred", eval_pred, "annotated prediction file")
      ->required();
  eval_cmd->add_option("--report", eval_report,
                       "also write a machine-readable summary here");

  // inspect
  auto* inspect_cmd = app.add_subcommand(
      "inspect", "print per-feature conditional probabilities of a model");
  std::string ins_model, ins_feature;
  inspect_cmd->add_option("--model", ins_model, "model file")->required();
  inspect_cmd->add_option("--feature", ins_feature,
                          "only this feature (default: all)");

  // experiment
  auto* exp_cmd = app.add_subcommand(
      "experiment",
      "run the manual, plain-maxent and rebalanced-maxent arms on a split");
  std::string exp_train, exp_test, exp_rules;
  detail::CommonTrainFlags exp_flags;
  exp_cmd->add_option("--train", exp_train, "gold-labeled training corpus")
      ->required();
  exp_cmd->add_option("--test", exp_test, "gold-labeled test corpus")
      ->required();
  exp_cmd->add_option("--rules", exp_rules, "rule file")->required();
  exp_flags.attach(exp_cmd);

  try {
    std::reverse(args.begin(), args.end());  // CLI11 vector parse order
    app.parse(std::move(args));

    if (train_cmd->parsed()) {
      detail::run_train(train_corpus, train_rules, rebalance_text, train_flags,
                        train_out, err);
    } else if (classify_cmd->parsed()) {
      detail::run_classify(cls_corpus, cls_rules, cls_decider, cls_model,
                           cls_articles, cls_out, err);
    } else if (eval_cmd->parsed()) {
      detail::run_evaluate(eval_gold, eval_pred, eval_report, out);
    } else if (inspect_cmd->parsed()) {
      detail::run_inspect(ins_model, ins_feature, out);
    } else if (exp_cmd->parsed()) {
      detail::run_experiment_cmd(exp_train, exp_test, exp_rules, exp_flags, out,
                                 err);
    }
    return 0;
  } catch (const CLI::CallForHelp&) {
    const auto parsed = app.get_subcommands();
    out << (parsed.empty() ? app.help() : parsed.front()->help());
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return 1;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const TrainError& e) {
    err << "training error: " << e.what() << "\n";
    return 3;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const DataError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace refprop::cli
