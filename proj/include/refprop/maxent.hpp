#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "refprop/category.hpp"
#include "refprop/corpus.hpp"
#include "refprop/errors.hpp"
#include "refprop/rules.hpp"

namespace refprop {

/// One training instance: the rule conditions that held for an NP, its gold
/// category, and a real-valued weight (rebalancing scales weights rather than
/// duplicating records).
struct Event {
  std::vector<std::string> features;  // rule ids, treated as a set
  Category gold = Category::indefinite;
  double weight = 1.0;
};

struct CompiledEvents {
  std::vector<Event> events;
  std::vector<std::string> diagnostics;  // skipped NPs, one line each
};

/// Turns a fully gold-labeled corpus into training events. Dynamic rule
/// conditions see the gold labels of earlier NPs in the same document.
/// NPs with gold "other" and NPs firing no rules are skipped with a
/// diagnostic. Throws DataError when a gold label is missing.
inline CompiledEvents compile_events(const Corpus& corpus, const RuleSet& rules) {
  CompiledEvents out;
  for (const Document& doc : corpus.documents) {
    DiscourseStore store;
    for (const NPContext& np : doc.nps) {
      const std::string where = "doc '" + doc.doc_id + "' np " +
                                std::to_string(np.np_index) + " ('" +
                                np.surface + "')";
      if (!np.gold) throw DataError("missing gold label for " + where);
      auto fired = fire_rules(np, store, rules);
      if (np.gold->other) {
        out.diagnostics.push_back("skipped " + where + ": gold label is 'other'");
      } else if (fired.empty()) {
        out.diagnostics.push_back("skipped " + where + ": no rules fired");
      } else {
        out.events.push_back(Event{std::move(fired), np.gold->category, 1.0});
      }
      if (!np.gold->other)
        store.assign(np.surface, np.gold->category, np.sentence_index);
    }
  }
  return out;
}

// --- class rebalancing ------------------------------------------------------

/// factor_c = round(2 * p_max / p_c), half away from zero. Balances category
/// frequencies so training weights the rare categories up.
inline PerCategory<int> rebalance_factors_from_frequencies(
    const PerCategory<double>& freq) {
  double max_freq = 0.0;
  for (Category c : kAllCategories) {
    if (freq[c] <= 0.0)
      throw DataError("rebalance factors undefined: category '" +
                      std::string(category_name(c)) + "' has zero frequency");
    max_freq = std::max(max_freq, freq[c]);
  }
  PerCategory<int> factors;
  for (Category c : kAllCategories)
    factors[c] = static_cast<int>(std::llround(2.0 * max_freq / freq[c]));
  return factors;
}

/// Derives inverse-occurrence factors from the (weighted) category
/// frequencies of the events. Every category must occur.
inline PerCategory<int> compute_rebalance_factors(const std::vector<Event>& events) {
  PerCategory<double> mass{{0.0, 0.0, 0.0}};
  double total = 0.0;
  for (const Event& e : events) {
    mass[e.gold] += e.weight;
    total += e.weight;
  }
  if (total <= 0.0) throw DataError("rebalance factors undefined: no events");
  PerCategory<double> freq;
  for (Category c : kAllCategories) freq[c] = mass[c] / total;
  return rebalance_factors_from_frequencies(freq);
}

/// Multiplies each event's weight by the factor of its gold category.
inline std::vector<Event> apply_rebalance(std::vector<Event> events,
                                          const PerCategory<int>& factors) {
  for (Category c : kAllCategories) {
    if (factors[c] <= 0)
      throw DataError("rebalance factors must be positive");
  }
  for (Event& e : events) e.weight *= factors[e.gold];
  return events;
}

// --- model ------------------------------------------------------------------

struct Rebalance {
  enum class Mode : std::uint8_t { none, automatic, explicit_factors };
  Mode mode = Mode::none;
  PerCategory<int> factors{{1, 1, 1}};  // used with explicit_factors

  static Rebalance none() { return {}; }
  static Rebalance automatic() { return {Mode::automatic, {{1, 1, 1}}}; }
  static Rebalance explicit_(const PerCategory<int>& f) {
    return {Mode::explicit_factors, f};
  }
};

struct IterationInfo {
  std::size_t iteration = 0;     // 0 = state before any update
  double log_likelihood = 0.0;   // weighted, over the smoothed event set
  double max_gap = 0.0;          // max |model expectation - smoothed count|
};

struct TrainConfig {
  std::size_t max_iterations = 500;
  double constraint_tolerance = 1e-4;
  double smoothing = 0.01;  // epsilon added to every (feature, category) cell
  Rebalance rebalance{};
  std::function<void(const IterationInfo&)> on_iteration;  // optional observer
};

struct TrainMeta {
  std::size_t iterations_run = 0;
  double final_constraint_gap = 0.0;
  double smoothing = 0.0;
  double correction_constant = 0.0;
};

/// Log-linear conditional model p(c | S) ∝ exp(Σ_{f∈S} λ[f][c]) with one
/// parameter per (feature, category) pair and no bias term.
class MaxEntModel {
 public:
  MaxEntModel() = default;

  MaxEntModel(std::vector<std::string> feature_index,
              std::vector<PerCategory<double>> params, double smoothing = 0.0)
      : feature_index_(std::move(feature_index)), lambda_(std::move(params)) {
    if (feature_index_.size() != lambda_.size())
      throw DataError("feature index and parameter table sizes differ");
    meta.smoothing = smoothing;
    reindex();
  }

  /// All-zero model over the given features; predicts uniform everywhere.
  static MaxEntModel zero(std::vector<std::string> feature_index,
                          double smoothing = 0.0) {
    std::vector<PerCategory<double>> params(feature_index.size());
    return MaxEntModel(std::move(feature_index), std::move(params), smoothing);
  }

  const std::vector<std::string>& feature_index() const { return feature_index_; }
  std::size_t feature_count() const { return feature_index_.size(); }

  std::optional<std::size_t> index_of(std::string_view id) const {
    auto it = by_id_.find(std::string(id));
    if (it == by_id_.end()) return std::nullopt;
    return it->second;
  }

  const PerCategory<double>& lambda(std::size_t feature) const {
    return lambda_[feature];
  }
  PerCategory<double>& lambda(std::size_t feature) { return lambda_[feature]; }

  TrainMeta meta;

  friend bool operator==(const MaxEntModel& a, const MaxEntModel& b) {
    return a.feature_index_ == b.feature_index_ && a.lambda_ == b.lambda_;
  }

 private:
  void reindex() {
    by_id_.clear();
    for (std::size_t i = 0; i < feature_index_.size(); ++i)
      by_id_[feature_index_[i]] = i;
  }

  std::vector<std::string> feature_index_;
  std::vector<PerCategory<double>> lambda_;
  std::unordered_map<std::string, std::size_t> by_id_;
};

namespace detail {

inline PerCategory<double> softmax(const PerCategory<double>& scores) {
  double m = scores[Category::indefinite];
  for (Category c : kAllCategories) m = std::max(m, scores[c]);
  PerCategory<double> p;
  double z = 0.0;
  for (Category c : kAllCategories) {
    p[c] = std::exp(scores[c] - m);
    z += p[c];
  }
  for (Category c : kAllCategories) p[c] /= z;
  return p;
}

inline std::vector<std::uint32_t> resolve_feature_set(
    const MaxEntModel& model, const std::vector<std::string>& features) {
  std::vector<std::uint32_t> idx;
  idx.reserve(features.size());
  for (const auto& id : features) {
    auto i = model.index_of(id);
    if (!i) throw DataError("unknown feature id '" + id + "'");
    idx.push_back(static_cast<std::uint32_t>(*i));
  }
  std::sort(idx.begin(), idx.end());
  idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
  return idx;
}

}  // namespace detail

/// p(c | features), normalized over the three categories. Scores accumulate
/// in the log domain, so large parameter sums cannot overflow.
inline PerCategory<double> predict(const MaxEntModel& model,
                                   const std::vector<std::string>& features) {
  const auto idx = detail::resolve_feature_set(model, features);
  PerCategory<double> scores{{0.0, 0.0, 0.0}};
  for (auto i : idx) {
    for (Category c : kAllCategories) scores[c] += model.lambda(i)[c];
  }
  return detail::softmax(scores);
}

/// The model's category distribution when exactly one condition holds.
inline PerCategory<double> per_feature_conditional(const MaxEntModel& model,
                                                   std::string_view feature) {
  auto i = model.index_of(feature);
  if (!i) throw DataError("unknown feature id '" + std::string(feature) + "'");
  return detail::softmax(model.lambda(*i));
}

struct MLDecision {
  Category category = Category::indefinite;
  PerCategory<double> probabilities{{0.0, 0.0, 0.0}};
  bool defaulted = false;
};

/// Argmax of predict, ties broken definite > indefinite > generic. An empty
/// feature set falls back to indefinite with a uniform distribution.
inline MLDecision decide_ml(const MaxEntModel& model,
                            const std::vector<std::string>& features) {
  if (features.empty())
    return {Category::indefinite, {{1.0 / 3, 1.0 / 3, 1.0 / 3}}, true};
  const auto p = predict(model, features);
  Category best = Category::definite;
  double best_p = -1.0;
  for (Category c : kTieBreakOrder) {
    if (p[c] > best_p) {
      best = c;
      best_p = p[c];
    }
  }
  return {best, p, false};
}

// --- training ---------------------------------------------------------------

namespace detail {

struct ResolvedEvent {
  std::vector<std::uint32_t> features;
  Category gold;
  double weight;
};

}  // namespace detail

/// Fits the model by generalized iterative scaling.
///
/// `feature_ids` is the full feature universe (normally RuleSet::ids());
/// features never observed in training still get parameters, so the model
/// stays aligned with its rule set.
///
/// Smoothing adds one pseudo-event ({f}, c, ε) per (feature, category) cell,
/// which adds ε to every empirical count and keeps the constraint system
/// feasible. Event weights are first scaled to mean 1 so the smoothing
/// strength does not depend on the overall weight scale.
///
/// The correction constant C is the maximum active-feature count; the
/// implicit slack feature is class-symmetric, so its constraint holds for any
/// parameters and its weight stays zero.
inline MaxEntModel train(const std::vector<Event>& events,
                         const std::vector<std::string>& feature_ids,
                         const TrainConfig& config = {}) {
  if (events.empty()) throw DataError("cannot train on an empty event list");
  if (config.smoothing < 0.0) throw DataError("smoothing must be nonnegative");
  if (config.constraint_tolerance <= 0.0)
    throw DataError("constraint tolerance must be positive");

  // Rebalancing per config.
  std::vector<Event> rebalanced;
  const std::vector<Event>* source = &events;
  if (config.rebalance.mode == Rebalance::Mode::automatic) {
    rebalanced = apply_rebalance(events, compute_rebalance_factors(events));
    source = &rebalanced;
  } else if (config.rebalance.mode == Rebalance::Mode::explicit_factors) {
    rebalanced = apply_rebalance(events, config.rebalance.factors);
    source = &rebalanced;
  }

  MaxEntModel model = MaxEntModel::zero(feature_ids, config.smoothing);
  const std::size_t nfeat = model.feature_count();

  // Resolve features and normalize weights to mean 1.
  std::vector<detail::ResolvedEvent> data;
  data.reserve(source->size() + 3 * nfeat);
  double total_weight = 0.0;
  for (const Event& e : *source) {
    if (e.weight <= 0.0) throw DataError("event weights must be positive");
    data.push_back({detail::resolve_feature_set(model, e.features), e.gold,
                    e.weight});
    total_weight += e.weight;
  }
  const double scale = static_cast<double>(source->size()) / total_weight;
  for (auto& e : data) e.weight *= scale;

  const double eps = config.smoothing;
  if (eps > 0.0) {
    for (std::uint32_t f = 0; f < nfeat; ++f) {
      for (Category c : kAllCategories) data.push_back({{f}, c, eps});
    }
  }

  std::size_t max_active = 1;
  for (const auto& e : data) max_active = std::max(max_active, e.features.size());
  const double correction = static_cast<double>(max_active);

  // Smoothed empirical (feature, category) counts.
  std::vector<PerCategory<double>> empirical(nfeat);
  for (const auto& e : data) {
    for (auto f : e.features) empirical[f][e.gold] += e.weight;
  }

  std::vector<PerCategory<double>> expected(nfeat);
  double log_likelihood = 0.0;

  const auto compute_expectations = [&]() {
    for (auto& row : expected) row = PerCategory<double>{{0.0, 0.0, 0.0}};
    log_likelihood = 0.0;
    for (const auto& e : data) {
      PerCategory<double> scores{{0.0, 0.0, 0.0}};
      for (auto f : e.features) {
        for (Category c : kAllCategories) scores[c] += model.lambda(f)[c];
      }
      double m = scores[Category::indefinite];
      for (Category c : kAllCategories) m = std::max(m, scores[c]);
      double z = 0.0;
      PerCategory<double> p;
      for (Category c : kAllCategories) {
        p[c] = std::exp(scores[c] - m);
        z += p[c];
      }
      for (Category c : kAllCategories) p[c] /= z;
      for (auto f : e.features) {
        for (Category c : kAllCategories) expected[f][c] += e.weight * p[c];
      }
      log_likelihood += e.weight * (scores[e.gold] - (m + std::log(z)));
    }
  };

  const auto max_gap = [&]() {
    double gap = 0.0;
    for (std::size_t f = 0; f < nfeat; ++f) {
      for (Category c : kAllCategories)
        gap = std::max(gap, std::abs(expected[f][c] - empirical[f][c]));
    }
    return gap;
  };

  compute_expectations();
  double gap = max_gap();
  if (config.on_iteration)
    config.on_iteration({0, log_likelihood, gap});

  std::size_t updates = 0;
  while (gap > config.constraint_tolerance && updates < config.max_iterations) {
    for (std::size_t f = 0; f < nfeat; ++f) {
      for (Category c : kAllCategories) {
        const double emp = empirical[f][c];
        const double exp_ = expected[f][c];
        if (emp == 0.0 && exp_ == 0.0) continue;  // feature occurs in no event
        const double next = model.lambda(f)[c] + std::log(emp / exp_) / correction;
        if (!std::isfinite(next))
          throw TrainError(updates + 1, "non-finite parameter for feature '" +
                                            feature_ids[f] + "', category '" +
                                            std::string(category_name(c)) + "'");
        model.lambda(f)[c] = next;
      }
    }
    ++updates;
    compute_expectations();
    gap = max_gap();
    if (config.on_iteration)
      config.on_iteration({updates, log_likelihood, gap});
  }

  model.meta.iterations_run = updates;
  model.meta.final_constraint_gap = gap;
  model.meta.smoothing = eps;
  model.meta.correction_constant = correction;
  return model;
}

inline MaxEntModel train(const std::vector<Event>& events, const RuleSet& rules,
                         const TrainConfig& config = {}) {
  return train(events, rules.ids(), config);
}

// --- serialization ----------------------------------------------------------

namespace detail {

inline std::string format_double17(double v) {
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, r.ptr);
}

inline double parse_double(std::string_view s, int line) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size())
    throw ParseError(line, "malformed number '" + std::string(s) + "'");
  return v;
}

}  // namespace detail

inline constexpr std::string_view kModelHeader = "refprop-maxent v1";

/// Model file: header, smoothing, feature count, then one tab-separated
/// parameter line per feature. 17 significant digits, so save/load
/// round-trips are bit-exact.
inline std::string save_model(const MaxEntModel& model) {
  std::string out{kModelHeader};
  out += "\nsmoothing " + detail::format_double17(model.meta.smoothing);
  out += "\nfeatures " + std::to_string(model.feature_count());
  for (std::size_t i = 0; i < model.feature_count(); ++i) {
    out += '\n';
    out += model.feature_index()[i];
    for (Category c : kAllCategories) {
      out += '\t';
      out += detail::format_double17(model.lambda(i)[c]);
    }
  }
  out += '\n';
  return out;
}

inline MaxEntModel load_model(std::string_view text) {
  const auto lines = detail::split_lines(text);
  if (lines.empty() || lines[0] != kModelHeader)
    throw ParseError(1, "expected header '" + std::string(kModelHeader) + "'");
  if (lines.size() < 3) throw ParseError(static_cast<int>(lines.size()),
                                         "truncated model file");
  if (!lines[1].starts_with("smoothing "))
    throw ParseError(2, "expected 'smoothing <epsilon>'");
  const double smoothing = detail::parse_double(lines[1].substr(10), 2);
  if (!lines[2].starts_with("features "))
    throw ParseError(3, "expected 'features <count>'");
  const auto count = detail::parse_int(lines[2].substr(9));
  if (!count || *count < 0) throw ParseError(3, "malformed feature count");

  std::vector<std::string> ids;
  std::vector<PerCategory<double>> params;
  for (std::size_t i = 3; i < lines.size(); ++i) {
    const int line_no = static_cast<int>(i) + 1;
    if (detail::is_blank(lines[i])) continue;
    const auto fields = detail::split(lines[i], '\t');
    if (fields.size() != 4)
      throw ParseError(line_no, "expected '<id>\\t<l1>\\t<l2>\\t<l3>'");
    if (fields[0].empty()) throw ParseError(line_no, "empty feature id");
    ids.emplace_back(fields[0]);
    PerCategory<double> row;
    row[Category::indefinite] = detail::parse_double(fields[1], line_no);
    row[Category::definite] = detail::parse_double(fields[2], line_no);
    row[Category::generic] = detail::parse_double(fields[3], line_no);
    params.push_back(row);
  }
  if (ids.size() != static_cast<std::size_t>(*count))
    throw ParseError(static_cast<int>(lines.size()),
                     "feature count mismatch: header says " +
                         std::to_string(*count) + ", found " +
                         std::to_string(ids.size()));
  return MaxEntModel(std::move(ids), std::move(params), smoothing);
}

}  // namespace refprop
