#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <variant>
#include <vector>

#include "refprop/category.hpp"
#include "refprop/corpus.hpp"
#include "refprop/errors.hpp"

namespace refprop {

// --- primitive condition tests -------------------------------------------

struct ParticleIs {
  std::string particle;
};

struct HeadClassIs {
  HeadClass head;
};

struct PredTenseIs {
  Tense tense;
};

struct PredPosIs {
  PredicatePos pos;
};

enum class FlagKind : std::uint8_t {
  demonstrative,
  aru,
  numeral,
  modifier,
  pron_in_mod,
};

struct FlagIs {
  FlagKind flag;
};

struct NoModifier {};

struct AdverbIs {
  AdverbClass adverb;
};

struct EmbeddedClauseIs {
  enum class Which : std::uint8_t { past, nonpast, any };
  Which which;
};

/// Fires when the modifying clause contains an NP whose surface form has
/// already been assigned `category`, marked by one of `particles`
/// (`any_particle` admits every particle).
struct EmbeddedHasCategory {
  Category category;
  std::vector<std::string> particles;
  bool any_particle = false;
};

/// Fires when the same surface form was assigned `category` at most
/// `window_sentences` sentences earlier in the document.
struct PriorSameHead {
  Category category;
  int window_sentences;
};

using PrimitiveTest =
    std::variant<ParticleIs, HeadClassIs, PredTenseIs, PredPosIs, FlagIs,
                 NoModifier, AdverbIs, EmbeddedClauseIs, EmbeddedHasCategory,
                 PriorSameHead>;

inline bool is_dynamic(const PrimitiveTest& test) {
  return std::holds_alternative<EmbeddedHasCategory>(test) ||
         std::holds_alternative<PriorSameHead>(test);
}

// --- rules ----------------------------------------------------------------

/// Per-category outcome attached to a rule: a 0/1 possibility gate and an
/// integer plausibility value in 0..10 (0 whenever the gate is 0).
struct Outcome {
  int possibility = 1;
  int value = 0;

  friend bool operator==(const Outcome&, const Outcome&) = default;
};

struct Rule {
  std::string id;
  std::vector<PrimitiveTest> condition;  // nonempty conjunction
  bool dynamic = false;                  // derived from the condition
  PerCategory<Outcome> outcomes;
};

class RuleSet {
 public:
  RuleSet() = default;
  explicit RuleSet(std::vector<Rule> rules) : rules_(std::move(rules)) {
    reindex();
  }

  const std::vector<Rule>& rules() const { return rules_; }
  std::size_t size() const { return rules_.size(); }
  bool empty() const { return rules_.empty(); }

  const Rule* find(std::string_view id) const {
    auto it = by_id_.find(std::string(id));
    return it == by_id_.end() ? nullptr : &rules_[it->second];
  }

  /// Rule ids in load order; this order is the maxent feature index.
  std::vector<std::string> ids() const {
    std::vector<std::string> out;
    out.reserve(rules_.size());
    for (const auto& r : rules_) out.push_back(r.id);
    return out;
  }

 private:
  void reindex() {
    by_id_.clear();
    for (std::size_t i = 0; i < rules_.size(); ++i) by_id_[rules_[i].id] = i;
  }

  std::vector<Rule> rules_;
  std::unordered_map<std::string, std::size_t> by_id_;
};

/// Per-document record of referential properties already assigned during a
/// left-to-right pass. Keeps the most recent assignment per surface form.
class DiscourseStore {
 public:
  struct Entry {
    Category category;
    int sentence_index;
  };

  void assign(std::string_view surface, Category category, int sentence_index) {
    entries_[std::string(surface)] = Entry{category, sentence_index};
  }

  std::optional<Entry> lookup(std::string_view surface) const {
    auto it = entries_.find(std::string(surface));
    if (it == entries_.end()) return std::nullopt;
    return it->second;
  }

  void erase(std::string_view surface) { entries_.erase(std::string(surface)); }
  void clear() { entries_.clear(); }
  std::size_t size() const { return entries_.size(); }

 private:
  std::unordered_map<std::string, Entry> entries_;
};

// --- rule file loading ------------------------------------------------------

namespace detail {

inline std::optional<FlagKind> flag_from_code(std::string_view s) {
  if (s == "demonstrative") return FlagKind::demonstrative;
  if (s == "aru") return FlagKind::aru;
  if (s == "numeral") return FlagKind::numeral;
  if (s == "modifier") return FlagKind::modifier;
  if (s == "pron_in_mod") return FlagKind::pron_in_mod;
  return std::nullopt;
}

inline PrimitiveTest parse_primitive(std::string_view text, int line,
                                     const std::string& rule_id) {
  const auto fail = [&](const std::string& why) -> ParseError {
    return ParseError(line, "rule '" + rule_id + "': " + why + " in test '" +
                                std::string(text) + "'");
  };
  if (text == "no_modifier") return NoModifier{};
  const std::size_t eq = text.find('=');
  if (eq == std::string_view::npos) throw fail("unknown primitive");
  const std::string_view key = text.substr(0, eq);
  const std::string_view value = text.substr(eq + 1);
  if (key == "particle") {
    if (value.empty()) throw fail("empty particle");
    return ParticleIs{std::string(value)};
  }
  if (key == "head") {
    auto v = head_from_code(value);
    if (!v) throw fail("bad head class");
    return HeadClassIs{*v};
  }
  if (key == "pred_tense") {
    auto v = tense_from_code(value);
    if (!v) throw fail("bad tense");
    return PredTenseIs{*v};
  }
  if (key == "pred_pos") {
    auto v = pred_pos_from_code(value);
    if (!v) throw fail("bad predicate part of speech");
    return PredPosIs{*v};
  }
  if (key == "flag") {
    auto v = flag_from_code(value);
    if (!v) throw fail("bad flag name");
    return FlagIs{*v};
  }
  if (key == "adverb") {
    if (value != "generic") throw fail("bad adverb class");
    return AdverbIs{AdverbClass::generic_adverb};
  }
  if (key == "embedded") {
    if (value == "past") return EmbeddedClauseIs{EmbeddedClauseIs::Which::past};
    if (value == "nonpast")
      return EmbeddedClauseIs{EmbeddedClauseIs::Which::nonpast};
    if (value == "any") return EmbeddedClauseIs{EmbeddedClauseIs::Which::any};
    throw fail("bad embedded clause kind");
  }
  if (key == "embedded_has") {
    const std::size_t colon = value.find(':');
    if (colon == std::string_view::npos) throw fail("expected category:particles");
    auto cat = category_from_code(value.substr(0, colon));
    if (!cat) throw fail("bad category");
    const std::string_view plist = value.substr(colon + 1);
    if (plist == "*") return EmbeddedHasCategory{*cat, {}, true};
    EmbeddedHasCategory test{*cat, {}, false};
    for (auto p : split(plist, ',')) {
      if (p.empty()) throw fail("empty particle in particle set");
      test.particles.emplace_back(p);
    }
    if (test.particles.empty()) throw fail("empty particle set");
    return test;
  }
  if (key == "prior_same_head") {
    const std::size_t colon = value.find(':');
    if (colon == std::string_view::npos) throw fail("expected category:window");
    auto cat = category_from_code(value.substr(0, colon));
    if (!cat) throw fail("bad category");
    auto window = parse_int(value.substr(colon + 1));
    if (!window || *window < 1) throw fail("bad sentence window");
    return PriorSameHead{*cat, *window};
  }
  throw fail("unknown primitive");
}

inline Outcome parse_outcome(std::string_view text, int line,
                             const std::string& rule_id) {
  auto parts = split(trim(text), ' ');
  std::erase_if(parts, [](std::string_view p) { return p.empty(); });
  if (parts.size() != 2)
    throw ParseError(line, "rule '" + rule_id +
                               "': outcome needs '<possibility> <value>'");
  const auto p = parse_int(parts[0]);
  const auto v = parse_int(parts[1]);
  if (!p || (*p != 0 && *p != 1))
    throw ParseError(line, "rule '" + rule_id + "': possibility must be 0 or 1");
  if (!v || *v < 0 || *v > 10)
    throw ParseError(line, "rule '" + rule_id + "': value must be in 0..10");
  if (*p == 0 && *v != 0)
    throw ParseError(line, "rule '" + rule_id +
                               "': value must be 0 when possibility is 0");
  return Outcome{*p, *v};
}

}  // namespace detail

/// Loads the rule file format: records separated by blank lines, each with
/// `rule:`, `when:` and three outcome lines. `#` lines are comments. Dynamic
/// flags are derived from the parsed condition, never read from the file.
inline RuleSet load_rules(std::string_view text) {
  std::vector<Rule> rules;
  std::unordered_set<std::string> seen_ids;

  struct Pending {
    Rule rule;
    int start_line = 0;
    bool has_when = false;
    PerCategory<bool> has_outcome{};
  };
  std::optional<Pending> pending;

  const auto finish = [&](int line) {
    if (!pending) return;
    Pending& p = *pending;
    if (!p.has_when)
      throw ParseError(line, "rule '" + p.rule.id + "': missing 'when:' line");
    for (Category c : kAllCategories) {
      if (!p.has_outcome[c])
        throw ParseError(line, "rule '" + p.rule.id + "': missing '" +
                                   std::string(category_code(c)) + ":' outcome");
    }
    p.rule.dynamic = std::any_of(p.rule.condition.begin(), p.rule.condition.end(),
                                 [](const PrimitiveTest& t) { return is_dynamic(t); });
    rules.push_back(std::move(p.rule));
    pending.reset();
  };

  const auto lines = detail::split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const int line_no = static_cast<int>(i) + 1;
    const std::string_view raw = lines[i];
    if (detail::is_blank(raw)) {
      finish(line_no);
      continue;
    }
    const std::string_view line = detail::trim(raw);
    if (line.front() == '#') continue;

    const std::size_t colon = line.find(':');
    if (colon == std::string_view::npos)
      throw ParseError(line_no, "expected 'key: value'");
    const std::string_view key = detail::trim(line.substr(0, colon));
    const std::string_view value = detail::trim(line.substr(colon + 1));

    if (key == "rule") {
      finish(line_no);
      if (value.empty()) throw ParseError(line_no, "empty rule id");
      std::string id{value};
      if (!seen_ids.insert(id).second)
        throw ParseError(line_no, "duplicate rule id '" + id + "'");
      pending = Pending{};
      pending->rule.id = std::move(id);
      pending->start_line = line_no;
      continue;
    }
    if (!pending)
      throw ParseError(line_no, "'" + std::string(key) +
                                    ":' before any 'rule:' line");
    Pending& p = *pending;
    if (key == "when") {
      if (p.has_when)
        throw ParseError(line_no, "rule '" + p.rule.id + "': duplicate 'when:'");
      for (std::string_view part : detail::split(value, ' ')) {
        // conjunction syntax: tests joined by " AND "
        part = detail::trim(part);
        if (part.empty() || part == "AND") continue;
        p.rule.condition.push_back(
            detail::parse_primitive(part, line_no, p.rule.id));
      }
      if (p.rule.condition.empty())
        throw ParseError(line_no, "rule '" + p.rule.id + "': empty condition");
      p.has_when = true;
      continue;
    }
    if (auto cat = category_from_code(key)) {
      if (p.has_outcome[*cat])
        throw ParseError(line_no, "rule '" + p.rule.id + "': duplicate '" +
                                      std::string(key) + ":' outcome");
      p.rule.outcomes[*cat] = detail::parse_outcome(value, line_no, p.rule.id);
      p.has_outcome[*cat] = true;
      continue;
    }
    throw ParseError(line_no, "unknown line '" + std::string(key) + ":'");
  }
  finish(static_cast<int>(lines.size()) + 1);
  return RuleSet(std::move(rules));
}

// --- rule firing ------------------------------------------------------------

namespace detail {

struct PrimitiveMatcher {
  const NPContext& ctx;
  const DiscourseStore& store;

  bool operator()(const ParticleIs& t) const {
    return ctx.particle && *ctx.particle == t.particle;
  }
  bool operator()(const HeadClassIs& t) const { return ctx.head_class == t.head; }
  bool operator()(const PredTenseIs& t) const {
    return ctx.predicate_tense == t.tense;
  }
  bool operator()(const PredPosIs& t) const { return ctx.predicate_pos == t.pos; }
  bool operator()(const FlagIs& t) const {
    switch (t.flag) {
      case FlagKind::demonstrative: return ctx.demonstrative;
      case FlagKind::aru: return ctx.aru_modifier;
      case FlagKind::numeral: return ctx.numeral_modifier;
      case FlagKind::modifier: return ctx.has_modifier;
      case FlagKind::pron_in_mod: return ctx.pronoun_in_modifier;
    }
    return false;
  }
  bool operator()(const NoModifier&) const { return !ctx.has_modifier; }
  bool operator()(const AdverbIs& t) const { return ctx.adverb_class == t.adverb; }
  bool operator()(const EmbeddedClauseIs& t) const {
    switch (t.which) {
      case EmbeddedClauseIs::Which::past:
        return ctx.embedded_clause == EmbeddedClause::past;
      case EmbeddedClauseIs::Which::nonpast:
        return ctx.embedded_clause == EmbeddedClause::nonpast;
      case EmbeddedClauseIs::Which::any:
        return ctx.embedded_clause != EmbeddedClause::none;
    }
    return false;
  }
  bool operator()(const EmbeddedHasCategory& t) const {
    for (const auto& e : ctx.embedded_nps) {
      const auto entry = store.lookup(e.surface);
      if (!entry || entry->category != t.category) continue;
      if (t.any_particle) return true;
      if (std::find(t.particles.begin(), t.particles.end(), e.particle) !=
          t.particles.end())
        return true;
    }
    return false;
  }
  bool operator()(const PriorSameHead& t) const {
    const auto entry = store.lookup(ctx.surface);
    if (!entry || entry->category != t.category) return false;
    const int distance = ctx.sentence_index - entry->sentence_index;
    return distance >= 0 && distance <= t.window_sentences;
  }
};

}  // namespace detail

inline bool rule_matches(const Rule& rule, const NPContext& ctx,
                         const DiscourseStore& store) {
  detail::PrimitiveMatcher matcher{ctx, store};
  return std::all_of(rule.condition.begin(), rule.condition.end(),
                     [&](const PrimitiveTest& t) { return std::visit(matcher, t); });
}

/// Returns the ids of every rule whose whole condition holds for (ctx, store),
/// in rule-set order. Pure: no side effects on the store.
inline std::vector<std::string> fire_rules(const NPContext& ctx,
                                           const DiscourseStore& store,
                                           const RuleSet& rules) {
  std::vector<std::string> fired;
  for (const Rule& rule : rules.rules()) {
    if (rule_matches(rule, ctx, store)) fired.push_back(rule.id);
  }
  return fired;
}

/// Resolves fired rule ids back to rules. Unknown ids raise DataError.
inline std::vector<const Rule*> gather_rules(const RuleSet& rules,
                                             const std::vector<std::string>& ids) {
  std::vector<const Rule*> out;
  out.reserve(ids.size());
  for (const auto& id : ids) {
    const Rule* rule = rules.find(id);
    if (!rule) throw DataError("unknown rule id '" + id + "'");
    out.push_back(rule);
  }
  return out;
}

}  // namespace refprop
