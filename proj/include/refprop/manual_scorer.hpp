#pragma once

#include <vector>

#include "refprop/category.hpp"
#include "refprop/rules.hpp"

namespace refprop {

/// Aggregated rule outcome: per-category 0/1 possibility (conjunction over
/// fired rules) and per-category integer value (sum over fired rules).
/// Exact integer arithmetic throughout.
struct ScoreTriple {
  PerCategory<int> possibility{{1, 1, 1}};  // empty conjunction
  PerCategory<int> value{{0, 0, 0}};        // empty sum

  friend bool operator==(const ScoreTriple&, const ScoreTriple&) = default;
};

/// Conjoins possibilities and sums values across the fired rules.
inline ScoreTriple aggregate(const std::vector<const Rule*>& fired) {
  ScoreTriple score;
  for (const Rule* rule : fired) {
    for (Category c : kAllCategories) {
      score.possibility[c] &= rule->outcomes[c].possibility;
      score.value[c] += rule->outcomes[c].value;
    }
  }
  return score;
}

struct ManualDecision {
  Category category = Category::indefinite;
  bool defaulted = false;
};

/// Picks the admissible category (possibility 1) with the highest value.
/// Ties break definite > indefinite > generic. With no fired rules, or no
/// admissible category, falls back to indefinite and sets `defaulted`.
inline ManualDecision decide_manual(const ScoreTriple& score, bool any_fired) {
  if (!any_fired) return {Category::indefinite, true};
  bool found = false;
  Category best = Category::indefinite;
  int best_value = 0;
  for (Category c : kTieBreakOrder) {
    if (score.possibility[c] != 1) continue;
    if (!found || score.value[c] > best_value) {
      found = true;
      best = c;
      best_value = score.value[c];
    }
  }
  if (!found) return {Category::indefinite, true};
  return {best, false};
}

}  // namespace refprop
