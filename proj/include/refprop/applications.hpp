#pragma once

#include <string>
#include <vector>

#include "refprop/category.hpp"

namespace refprop {

enum class ArticleChoice : std::uint8_t {
  indefinite_article,  // a/an
  definite_article,    // the
  no_article,
};

/// Admissible English article realizations for a noun phrase. Nonempty;
/// ambiguous exactly when more than one choice is admissible.
struct ArticleSuggestion {
  std::vector<ArticleChoice> choices;

  bool ambiguous() const { return choices.size() > 1; }

  bool admits(ArticleChoice c) const {
    for (ArticleChoice choice : choices) {
      if (choice == c) return true;
    }
    return false;
  }

  friend bool operator==(const ArticleSuggestion&,
                         const ArticleSuggestion&) = default;
};

/// Article generation mapping: indefinite singular takes "a/an", indefinite
/// plural takes no article, definite takes "the", and generic admits any of
/// the three realizations.
inline ArticleSuggestion suggest_article(Category category, bool plural) {
  switch (category) {
    case Category::indefinite:
      if (plural) return {{ArticleChoice::no_article}};
      return {{ArticleChoice::indefinite_article}};
    case Category::definite:
      return {{ArticleChoice::definite_article}};
    case Category::generic:
      return {{ArticleChoice::indefinite_article, ArticleChoice::definite_article,
               ArticleChoice::no_article}};
  }
  return {{ArticleChoice::indefinite_article}};
}

/// Only definite noun phrases can refer back to a previous noun phrase.
inline bool can_corefer(Category category) {
  return category == Category::definite;
}

inline std::string_view article_code(ArticleChoice c) {
  switch (c) {
    case ArticleChoice::indefinite_article: return "a";
    case ArticleChoice::definite_article: return "the";
    case ArticleChoice::no_article: return "none";
  }
  return "?";
}

/// Value for the `article=` output key, e.g. "the" or "a,the,none".
inline std::string article_key(const ArticleSuggestion& suggestion) {
  std::string out;
  for (ArticleChoice c : suggestion.choices) {
    if (!out.empty()) out += ',';
    out += article_code(c);
  }
  return out;
}

}  // namespace refprop
