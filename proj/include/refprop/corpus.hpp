#pragma once

#include <charconv>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include "refprop/category.hpp"
#include "refprop/errors.hpp"

namespace refprop {

enum class HeadClass : std::uint8_t { common, proper, pronoun };
enum class Tense : std::uint8_t { past, nonpast, none };
enum class PredicatePos : std::uint8_t { verb, adjective, copula, none };
enum class AdverbClass : std::uint8_t { generic_adverb, none };
enum class EmbeddedClause : std::uint8_t { none, past, nonpast };

/// A noun phrase mentioned inside the clause that modifies the head noun.
struct EmbeddedNP {
  std::string surface;
  std::string particle;

  friend bool operator==(const EmbeddedNP&, const EmbeddedNP&) = default;
};

/// One noun-phrase occurrence with the surface attributes the rules test.
///
/// Records are pre-extracted: morphology and syntax happen upstream, this
/// library only consumes the resulting attribute bundle.
struct NPContext {
  std::string doc_id;
  int sentence_index = 0;
  int np_index = 0;  // position within the document, document order
  std::string surface;
  HeadClass head_class = HeadClass::common;
  std::optional<std::string> particle;
  Tense predicate_tense = Tense::none;
  PredicatePos predicate_pos = PredicatePos::none;
  bool demonstrative = false;
  bool aru_modifier = false;
  bool numeral_modifier = false;
  bool has_modifier = false;
  bool pronoun_in_modifier = false;
  AdverbClass adverb_class = AdverbClass::none;
  EmbeddedClause embedded_clause = EmbeddedClause::none;
  std::vector<EmbeddedNP> embedded_nps;
  std::optional<GoldLabel> gold;

  friend bool operator==(const NPContext&, const NPContext&) = default;
};

struct Document {
  std::string doc_id;
  std::vector<NPContext> nps;

  friend bool operator==(const Document&, const Document&) = default;
};

struct Corpus {
  std::vector<Document> documents;

  std::size_t np_count() const {
    std::size_t n = 0;
    for (const auto& d : documents) n += d.nps.size();
    return n;
  }

  friend bool operator==(const Corpus&, const Corpus&) = default;
};

/// Validation finding. Diagnostics are data, not exceptions.
struct Diagnostic {
  enum class Kind {
    ordering,            // np_index / sentence_index out of order
    embedded_mismatch,   // embedded NPs listed without an embedded clause
    duplicate_doc_id,
    doc_id_mismatch,     // NPContext.doc_id differs from its document
    missing_gold,
  };

  Kind kind;
  std::string doc_id;
  int np_index = -1;
  std::string message;
};

namespace detail {

inline std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) {
      if (start < text.size()) lines.push_back(text.substr(start));
      break;
    }
    lines.push_back(text.substr(start, end - start));
    start = end + 1;
  }
  for (auto& l : lines) {
    if (!l.empty() && l.back() == '\r') l.remove_suffix(1);
  }
  return lines;
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

inline bool is_blank(std::string_view s) { return trim(s).empty(); }

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    std::size_t end = s.find(sep, start);
    if (end == std::string_view::npos) {
      out.push_back(s.substr(start));
      break;
    }
    out.push_back(s.substr(start, end - start));
    start = end + 1;
  }
  return out;
}

inline std::optional<int> parse_int(std::string_view s) {
  int value = 0;
  const char* begin = s.data();
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end) return std::nullopt;
  return value;
}

inline std::optional<bool> parse_flag(std::string_view s) {
  if (s == "0") return false;
  if (s == "1") return true;
  return std::nullopt;
}

inline std::optional<HeadClass> head_from_code(std::string_view s) {
  if (s == "common") return HeadClass::common;
  if (s == "proper") return HeadClass::proper;
  if (s == "pronoun") return HeadClass::pronoun;
  return std::nullopt;
}

inline std::optional<Tense> tense_from_code(std::string_view s) {
  if (s == "past") return Tense::past;
  if (s == "nonpast") return Tense::nonpast;
  if (s == "none") return Tense::none;
  return std::nullopt;
}

inline std::optional<PredicatePos> pred_pos_from_code(std::string_view s) {
  if (s == "verb") return PredicatePos::verb;
  if (s == "adjective") return PredicatePos::adjective;
  if (s == "copula") return PredicatePos::copula;
  if (s == "none") return PredicatePos::none;
  return std::nullopt;
}

inline std::optional<AdverbClass> adverb_from_code(std::string_view s) {
  if (s == "generic") return AdverbClass::generic_adverb;
  if (s == "none") return AdverbClass::none;
  return std::nullopt;
}

inline std::optional<EmbeddedClause> embedded_from_code(std::string_view s) {
  if (s == "none") return EmbeddedClause::none;
  if (s == "past") return EmbeddedClause::past;
  if (s == "nonpast") return EmbeddedClause::nonpast;
  return std::nullopt;
}

inline std::string_view head_code(HeadClass h) {
  switch (h) {
    case HeadClass::common: return "common";
    case HeadClass::proper: return "proper";
    case HeadClass::pronoun: return "pronoun";
  }
  return "?";
}

inline std::string_view tense_code(Tense t) {
  switch (t) {
    case Tense::past: return "past";
    case Tense::nonpast: return "nonpast";
    case Tense::none: return "none";
  }
  return "?";
}

inline std::string_view pred_pos_code(PredicatePos p) {
  switch (p) {
    case PredicatePos::verb: return "verb";
    case PredicatePos::adjective: return "adjective";
    case PredicatePos::copula: return "copula";
    case PredicatePos::none: return "none";
  }
  return "?";
}

inline std::string_view embedded_code(EmbeddedClause e) {
  switch (e) {
    case EmbeddedClause::none: return "none";
    case EmbeddedClause::past: return "past";
    case EmbeddedClause::nonpast: return "nonpast";
  }
  return "?";
}

}  // namespace detail

/// Hook for record keys beyond the core corpus vocabulary. Returns true when
/// the key was consumed; unconsumed keys become parse errors. The hook runs
/// once per matching token, after the record's NP has been appended, so
/// `np_slot` points at the NP the token belongs to.
using ExtraFieldHandler = std::function<bool(
    std::string_view key, std::string_view value, int line, std::size_t doc_index,
    std::size_t np_index)>;

namespace detail {

inline Corpus parse_corpus_impl(std::string_view text,
                                const ExtraFieldHandler& extra) {
  Corpus corpus;
  std::unordered_set<std::string> seen_docs;
  Document* current = nullptr;

  const auto lines = split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const int line_no = static_cast<int>(i) + 1;
    std::string_view line = lines[i];
    if (is_blank(line)) continue;
    if (line.starts_with("#doc")) {
      std::string_view rest = line.substr(4);
      if (!rest.empty() && rest.front() != ' ' && rest.front() != '\t') {
        // e.g. "#document" — an ordinary comment
        continue;
      }
      std::string id{trim(rest)};
      if (id.empty()) throw ParseError(line_no, "#doc requires a document id");
      if (!seen_docs.insert(id).second)
        throw ParseError(line_no, "duplicate document id '" + id + "'");
      corpus.documents.push_back(Document{id, {}});
      current = &corpus.documents.back();
      continue;
    }
    if (line.front() == '#') continue;
    if (current == nullptr)
      throw ParseError(line_no, "NP record before any #doc header");

    NPContext np;
    np.doc_id = current->doc_id;
    np.np_index = static_cast<int>(current->nps.size());

    bool saw_sent = false, saw_surface = false, saw_head = false;
    std::unordered_set<std::string> seen_keys;
    std::vector<std::pair<std::string, std::string>> extras;

    for (std::string_view token : split(line, '\t')) {
      if (token.empty()) continue;
      const std::size_t eq = token.find('=');
      if (eq == std::string_view::npos)
        throw ParseError(line_no, "token '" + std::string(token) +
                                      "' is not key=value");
      const std::string_view key = token.substr(0, eq);
      const std::string_view value = token.substr(eq + 1);
      const auto malformed = [&]() -> ParseError {
        return ParseError(line_no, "malformed value '" + std::string(value) +
                                       "' for key '" + std::string(key) + "'");
      };

      if (key != "embedded_np" && !seen_keys.insert(std::string(key)).second)
        throw ParseError(line_no, "duplicate key '" + std::string(key) + "'");

      if (key == "sent") {
        auto v = parse_int(value);
        if (!v || *v < 0) throw malformed();
        np.sentence_index = *v;
        saw_sent = true;
      } else if (key == "surface") {
        if (value.empty()) throw malformed();
        np.surface = std::string(value);
        saw_surface = true;
      } else if (key == "head") {
        auto v = head_from_code(value);
        if (!v) throw malformed();
        np.head_class = *v;
        saw_head = true;
      } else if (key == "particle") {
        if (value.empty()) throw malformed();
        np.particle = std::string(value);
      } else if (key == "pred_tense") {
        auto v = tense_from_code(value);
        if (!v) throw malformed();
        np.predicate_tense = *v;
      } else if (key == "pred_pos") {
        auto v = pred_pos_from_code(value);
        if (!v) throw malformed();
        np.predicate_pos = *v;
      } else if (key == "demonstrative") {
        auto v = parse_flag(value);
        if (!v) throw malformed();
        np.demonstrative = *v;
      } else if (key == "aru") {
        auto v = parse_flag(value);
        if (!v) throw malformed();
        np.aru_modifier = *v;
      } else if (key == "numeral") {
        auto v = parse_flag(value);
        if (!v) throw malformed();
        np.numeral_modifier = *v;
      } else if (key == "modifier") {
        auto v = parse_flag(value);
        if (!v) throw malformed();
        np.has_modifier = *v;
      } else if (key == "pron_in_mod") {
        auto v = parse_flag(value);
        if (!v) throw malformed();
        np.pronoun_in_modifier = *v;
      } else if (key == "adverb") {
        auto v = adverb_from_code(value);
        if (!v) throw malformed();
        np.adverb_class = *v;
      } else if (key == "embedded") {
        auto v = embedded_from_code(value);
        if (!v) throw malformed();
        np.embedded_clause = *v;
      } else if (key == "embedded_np") {
        const std::size_t colon = value.find(':');
        if (colon == std::string_view::npos || colon == 0 ||
            colon + 1 == value.size())
          throw malformed();
        np.embedded_nps.push_back(EmbeddedNP{
            std::string(value.substr(0, colon)),
            std::string(value.substr(colon + 1))});
      } else if (key == "gold") {
        auto v = gold_from_code(value);
        if (!v) throw malformed();
        np.gold = *v;
      } else {
        extras.emplace_back(std::string(key), std::string(value));
      }
    }

    if (!saw_sent) throw ParseError(line_no, "missing required key 'sent'");
    if (!saw_surface) throw ParseError(line_no, "missing required key 'surface'");
    if (!saw_head) throw ParseError(line_no, "missing required key 'head'");
    if (!np.embedded_nps.empty() && np.embedded_clause == EmbeddedClause::none)
      throw ParseError(line_no, "embedded_np listed without embedded=past|nonpast");
    if (!current->nps.empty() &&
        np.sentence_index < current->nps.back().sentence_index)
      throw ParseError(line_no, "sentence index decreases within document '" +
                                    current->doc_id + "'");

    current->nps.push_back(std::move(np));

    const std::size_t doc_index = corpus.documents.size() - 1;
    const std::size_t np_slot = current->nps.size() - 1;
    for (const auto& [key, value] : extras) {
      if (!extra || !extra(key, value, line_no, doc_index, np_slot))
        throw ParseError(line_no, "unknown key '" + key + "'");
    }
  }
  return corpus;
}

}  // namespace detail

/// Parses the corpus file format. Throws ParseError naming the line on any
/// malformed input. A successful parse always validates cleanly.
inline Corpus parse_corpus(std::string_view text) {
  return detail::parse_corpus_impl(text, nullptr);
}

/// Checks the corpus invariants; with `require_gold`, additionally that every
/// NP carries a gold label. Returns one diagnostic per violation.
inline std::vector<Diagnostic> validate(const Corpus& corpus, bool require_gold) {
  std::vector<Diagnostic> out;
  std::unordered_set<std::string> ids;
  for (const auto& doc : corpus.documents) {
    if (!ids.insert(doc.doc_id).second)
      out.push_back({Diagnostic::Kind::duplicate_doc_id, doc.doc_id, -1,
                     "duplicate document id '" + doc.doc_id + "'"});
    const NPContext* prev = nullptr;
    for (const auto& np : doc.nps) {
      if (np.doc_id != doc.doc_id)
        out.push_back({Diagnostic::Kind::doc_id_mismatch, doc.doc_id,
                       np.np_index,
                       "NP doc_id '" + np.doc_id + "' does not match document '" +
                           doc.doc_id + "'"});
      if (np.np_index < 0 || np.sentence_index < 0 ||
          (prev && np.np_index <= prev->np_index))
        out.push_back({Diagnostic::Kind::ordering, doc.doc_id, np.np_index,
                       "np_index must be nonnegative and strictly increasing"});
      if (prev && np.sentence_index < prev->sentence_index)
        out.push_back({Diagnostic::Kind::ordering, doc.doc_id, np.np_index,
                       "sentence_index decreases within document"});
      if (!np.embedded_nps.empty() && np.embedded_clause == EmbeddedClause::none)
        out.push_back({Diagnostic::Kind::embedded_mismatch, doc.doc_id,
                       np.np_index,
                       "embedded NPs listed without an embedded clause"});
      if (require_gold && !np.gold)
        out.push_back({Diagnostic::Kind::missing_gold, doc.doc_id, np.np_index,
                       "gold label required (doc '" + doc.doc_id + "', np " +
                           std::to_string(np.np_index) + ", '" + np.surface +
                           "')"});
      prev = &np;
    }
  }
  return out;
}

/// Serializes the core record fields as tab-separated key=value tokens.
/// Defaulted attributes are omitted, so write/parse round-trips are stable.
inline std::string record_fields(const NPContext& np) {
  std::string out;
  out += "sent=" + std::to_string(np.sentence_index);
  out += "\tsurface=" + np.surface;
  out += "\thead=" + std::string(detail::head_code(np.head_class));
  if (np.particle) out += "\tparticle=" + *np.particle;
  if (np.predicate_tense != Tense::none)
    out += "\tpred_tense=" + std::string(detail::tense_code(np.predicate_tense));
  if (np.predicate_pos != PredicatePos::none)
    out += "\tpred_pos=" + std::string(detail::pred_pos_code(np.predicate_pos));
  if (np.demonstrative) out += "\tdemonstrative=1";
  if (np.aru_modifier) out += "\taru=1";
  if (np.numeral_modifier) out += "\tnumeral=1";
  if (np.has_modifier) out += "\tmodifier=1";
  if (np.pronoun_in_modifier) out += "\tpron_in_mod=1";
  if (np.adverb_class == AdverbClass::generic_adverb) out += "\tadverb=generic";
  if (np.embedded_clause != EmbeddedClause::none)
    out += "\tembedded=" + std::string(detail::embedded_code(np.embedded_clause));
  for (const auto& e : np.embedded_nps)
    out += "\tembedded_np=" + e.surface + ":" + e.particle;
  if (np.gold) out += "\tgold=" + std::string(gold_code(*np.gold));
  return out;
}

/// Writes a corpus back to the file format. parse_corpus(write_corpus(c)) == c
/// for any corpus that validates.
inline std::string write_corpus(const Corpus& corpus) {
  std::string out;
  for (const auto& doc : corpus.documents) {
    out += "#doc " + doc.doc_id + "\n";
    for (const auto& np : doc.nps) {
      out += record_fields(np);
      out += '\n';
    }
  }
  return out;
}

}  // namespace refprop
