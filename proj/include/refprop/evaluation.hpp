#pragma once

#include <array>
#include <cmath>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "refprop/category.hpp"
#include "refprop/errors.hpp"

namespace refprop {

/// Gold-label columns in paper table order.
inline constexpr std::size_t kColumnCount = 4;
inline constexpr std::size_t kOtherColumn = 3;

inline std::size_t column_of(const GoldLabel& gold) {
  return gold.other ? kOtherColumn : static_cast<std::size_t>(gold.category);
}

inline std::string_view column_label(std::size_t col) {
  switch (col) {
    case 0: return "indef";
    case 1: return "def";
    case 2: return "gen";
    case 3: return "other";
  }
  return "?";
}

/// Per-gold-column correct/incorrect counts plus the gold x predicted
/// confusion matrix over the three real categories. Counts merge cell-wise.
struct CategoryCounts {
  struct Column {
    long correct = 0;
    long incorrect = 0;
    long total() const { return correct + incorrect; }

    friend bool operator==(const Column&, const Column&) = default;
  };

  std::array<Column, kColumnCount> columns{};
  // confusion[gold][predicted], real categories only
  std::array<std::array<long, kCategoryCount>, kCategoryCount> confusion{};

  Column& column(std::size_t col) { return columns[col]; }
  const Column& column(std::size_t col) const { return columns[col]; }
  Column& column(Category c) { return columns[static_cast<std::size_t>(c)]; }
  const Column& column(Category c) const {
    return columns[static_cast<std::size_t>(c)];
  }

  long total() const {
    long n = 0;
    for (const auto& col : columns) n += col.total();
    return n;
  }

  long total_correct() const {
    long n = 0;
    for (const auto& col : columns) n += col.correct;
    return n;
  }

  void merge(const CategoryCounts& other) {
    for (std::size_t i = 0; i < kColumnCount; ++i) {
      columns[i].correct += other.columns[i].correct;
      columns[i].incorrect += other.columns[i].incorrect;
    }
    for (std::size_t g = 0; g < kCategoryCount; ++g) {
      for (std::size_t p = 0; p < kCategoryCount; ++p)
        confusion[g][p] += other.confusion[g][p];
    }
  }

  friend bool operator==(const CategoryCounts&, const CategoryCounts&) = default;
};

/// Scores (gold, predicted) pairs. A prediction is correct when it equals the
/// gold category; gold-"other" pairs always score incorrect because the
/// system never predicts "other".
inline CategoryCounts score(
    const std::vector<std::pair<GoldLabel, Category>>& pairs) {
  CategoryCounts counts;
  for (const auto& [gold, predicted] : pairs) {
    const std::size_t col = column_of(gold);
    if (!gold.other && gold.category == predicted) {
      counts.columns[col].correct += 1;
    } else {
      counts.columns[col].incorrect += 1;
    }
    if (!gold.other) {
      counts.confusion[static_cast<std::size_t>(gold.category)]
                      [static_cast<std::size_t>(predicted)] += 1;
    }
  }
  return counts;
}

/// Percentage of correct decisions over every scored instance (all four
/// columns). Errors on empty counts.
inline double micro_accuracy(const CategoryCounts& counts) {
  const long total = counts.total();
  if (total == 0) throw DataError("micro accuracy undefined: no scored instances");
  return 100.0 * static_cast<double>(counts.total_correct()) /
         static_cast<double>(total);
}

/// Unweighted mean of the three real per-category accuracies. Gold-"other"
/// is excluded. Errors when a real category has no gold instances.
inline double macro_accuracy(const CategoryCounts& counts) {
  double sum = 0.0;
  for (Category c : kAllCategories) {
    const auto& col = counts.column(c);
    if (col.total() == 0)
      throw DataError("macro accuracy undefined: category '" +
                      std::string(category_name(c)) + "' has no gold instances");
    sum += 100.0 * static_cast<double>(col.correct) /
           static_cast<double>(col.total());
  }
  return sum / static_cast<double>(kCategoryCount);
}

// --- reports ------------------------------------------------------------------

struct ReportSection {
  std::string name;
  int sentence_count = 0;  // 0 when unknown
  CategoryCounts counts;
};

/// Scored results for one evaluated set, split into named sections (one per
/// source document group), mirroring the layout of the accuracy tables.
struct Report {
  std::string title;
  std::vector<ReportSection> sections;

  CategoryCounts totals() const {
    CategoryCounts merged;
    for (const auto& s : sections) merged.merge(s.counts);
    return merged;
  }

  std::optional<double> micro() const {
    const CategoryCounts merged = totals();
    if (merged.total() == 0) return std::nullopt;
    return micro_accuracy(merged);
  }

  std::optional<double> macro() const {
    const CategoryCounts merged = totals();
    for (Category c : kAllCategories) {
      if (merged.column(c).total() == 0) return std::nullopt;
    }
    return macro_accuracy(merged);
  }
};

namespace detail {

/// One decimal place, rounding half away from zero.
inline std::string format_percent(double value) {
  const double rounded = std::round(value * 10.0) / 10.0;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", rounded);
  return buf;
}

inline std::string pad_left(std::string_view s, std::size_t width) {
  std::string out;
  if (s.size() < width) out.assign(width - s.size(), ' ');
  out += s;
  return out;
}

inline std::string percent_cell(long part, long whole) {
  if (whole == 0) return "---";
  return format_percent(100.0 * static_cast<double>(part) /
                        static_cast<double>(whole));
}

}  // namespace detail

/// Renders the report as a fixed-width text table: per-section correct /
/// incorrect / % of correct rows, then an average block with % of appearance
/// and % of correct. Deterministic byte-for-byte.
inline std::string render_table(const Report& report) {
  constexpr std::size_t kLabelWidth = 20;
  constexpr std::size_t kCellWidth = 9;
  const char* kColumns[] = {"indef", "def", "gen", "other", "total"};

  std::string out;
  const auto row = [&](std::string_view label,
                       const std::array<std::string, 5>& cells) {
    std::string line{"  "};
    line += label;
    if (label.size() < kLabelWidth)
      line.append(kLabelWidth - label.size(), ' ');
    for (const auto& cell : cells) line += detail::pad_left(cell, kCellWidth);
    out += line;
    out += '\n';
  };

  const std::string rule_line(kLabelWidth + 2 + 5 * kCellWidth, '-');

  if (!report.title.empty()) {
    out += report.title;
    out += '\n';
  }
  {
    std::string header(kLabelWidth + 2, ' ');
    for (const char* c : kColumns) header += detail::pad_left(c, kCellWidth);
    out += header;
    out += '\n';
  }
  out += rule_line;
  out += '\n';

  const auto counts_rows = [&](const CategoryCounts& counts) {
    std::array<std::string, 5> correct, incorrect, pct;
    long total_correct = 0, total_incorrect = 0;
    for (std::size_t i = 0; i < kColumnCount; ++i) {
      correct[i] = std::to_string(counts.columns[i].correct);
      incorrect[i] = std::to_string(counts.columns[i].incorrect);
      pct[i] = detail::percent_cell(counts.columns[i].correct,
                                    counts.columns[i].total());
      total_correct += counts.columns[i].correct;
      total_incorrect += counts.columns[i].incorrect;
    }
    correct[4] = std::to_string(total_correct);
    incorrect[4] = std::to_string(total_incorrect);
    pct[4] = detail::percent_cell(total_correct, total_correct + total_incorrect);
    row("correct", correct);
    row("incorrect", incorrect);
    row("% of correct", pct);
  };

  for (const auto& section : report.sections) {
    std::string heading = section.name;
    const long nouns = section.counts.total();
    if (section.sentence_count > 0) {
      heading += " (" + std::to_string(section.sentence_count) + " sentences, " +
                 std::to_string(nouns) + " nouns)";
    } else {
      heading += " (" + std::to_string(nouns) + " nouns)";
    }
    out += heading;
    out += '\n';
    counts_rows(section.counts);
  }

  const CategoryCounts merged = report.totals();
  const long grand = merged.total();
  out += "average\n";
  {
    std::array<std::string, 5> cells;
    for (std::size_t i = 0; i < kColumnCount; ++i)
      cells[i] = detail::percent_cell(merged.columns[i].total(), grand);
    cells[4] = grand == 0 ? "---" : detail::format_percent(100.0);
    row("% of appearance", cells);
  }
  {
    std::array<std::string, 5> cells;
    for (std::size_t i = 0; i < kColumnCount; ++i)
      cells[i] = detail::percent_cell(merged.columns[i].correct,
                                      merged.columns[i].total());
    cells[4] = detail::percent_cell(merged.total_correct(), grand);
    row("% of correct", cells);
  }
  out += rule_line;
  out += '\n';

  const auto micro = report.micro();
  const auto macro = report.macro();
  out += "micro accuracy: ";
  out += micro ? detail::format_percent(*micro) : std::string("---");
  out += "    macro accuracy: ";
  out += macro ? detail::format_percent(*macro) : std::string("---");
  out += '\n';
  return out;
}

/// Machine-readable summary: key<TAB>value lines with micro/macro, the
/// per-column counts, and the full 3x3 confusion matrix.
inline std::string write_summary(const Report& report) {
  const CategoryCounts merged = report.totals();
  std::string out;
  const auto line = [&](std::string_view key, const std::string& value) {
    out += key;
    out += '\t';
    out += value;
    out += '\n';
  };
  const auto pct4 = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return std::string(buf);
  };

  const auto micro = report.micro();
  const auto macro = report.macro();
  line("micro", micro ? pct4(*micro) : "---");
  line("macro", macro ? pct4(*macro) : "---");
  for (std::size_t i = 0; i < kColumnCount; ++i) {
    line(std::string("correct_") + std::string(column_label(i)),
         std::to_string(merged.columns[i].correct));
    line(std::string("incorrect_") + std::string(column_label(i)),
         std::to_string(merged.columns[i].incorrect));
  }
  for (std::size_t g = 0; g < kCategoryCount; ++g) {
    for (std::size_t p = 0; p < kCategoryCount; ++p) {
      line("confusion_" + std::string(column_label(g)) + "_" +
               std::string(column_label(p)),
           std::to_string(merged.confusion[g][p]));
    }
  }
  return out;
}

}  // namespace refprop
