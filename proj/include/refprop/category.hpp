#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace refprop {

/// The three referential properties a noun phrase can be assigned.
enum class Category : std::uint8_t { indefinite = 0, definite = 1, generic = 2 };

inline constexpr std::size_t kCategoryCount = 3;

inline constexpr std::array<Category, kCategoryCount> kAllCategories = {
    Category::indefinite, Category::definite, Category::generic};

/// Tie-break order for argmax decisions: most frequent category first.
inline constexpr std::array<Category, kCategoryCount> kTieBreakOrder = {
    Category::definite, Category::indefinite, Category::generic};

/// Fixed-size container indexed by Category.
template <typename T>
struct PerCategory {
  std::array<T, kCategoryCount> values{};

  T& operator[](Category c) { return values[static_cast<std::size_t>(c)]; }
  const T& operator[](Category c) const {
    return values[static_cast<std::size_t>(c)];
  }

  auto begin() { return values.begin(); }
  auto begin() const { return values.begin(); }
  auto end() { return values.end(); }
  auto end() const { return values.end(); }

  friend bool operator==(const PerCategory&, const PerCategory&) = default;
};

inline std::string_view category_name(Category c) {
  switch (c) {
    case Category::indefinite: return "indefinite";
    case Category::definite: return "definite";
    case Category::generic: return "generic";
  }
  return "?";
}

/// Short code used in corpus and rule files.
inline std::string_view category_code(Category c) {
  switch (c) {
    case Category::indefinite: return "indef";
    case Category::definite: return "def";
    case Category::generic: return "gen";
  }
  return "?";
}

inline std::optional<Category> category_from_code(std::string_view code) {
  if (code == "indef") return Category::indefinite;
  if (code == "def") return Category::definite;
  if (code == "gen") return Category::generic;
  return std::nullopt;
}

/// Gold annotation: a category, or "other" when the annotator judged the
/// referential property ambiguous. "other" never appears as a prediction.
struct GoldLabel {
  bool other = false;
  Category category = Category::indefinite;  // meaningful only when !other

  static GoldLabel of(Category c) { return GoldLabel{false, c}; }
  static GoldLabel ambiguous() { return GoldLabel{true, Category::indefinite}; }

  friend bool operator==(const GoldLabel& a, const GoldLabel& b) {
    if (a.other != b.other) return false;
    return a.other || a.category == b.category;
  }
};

inline std::string_view gold_code(const GoldLabel& g) {
  return g.other ? std::string_view{"other"} : category_code(g.category);
}

inline std::optional<GoldLabel> gold_from_code(std::string_view code) {
  if (code == "other") return GoldLabel::ambiguous();
  if (auto c = category_from_code(code)) return GoldLabel::of(*c);
  return std::nullopt;
}

}  // namespace refprop
