#include "refprop/corpus.hpp"

#include <gtest/gtest.h>

#include <string>

namespace refprop {
namespace {

TEST(ParseCorpus, EmptyInputYieldsEmptyCorpus) {
  const Corpus corpus = parse_corpus("");
  EXPECT_EQ(corpus.documents.size(), 0u);
  EXPECT_EQ(corpus.np_count(), 0u);
}

TEST(ParseCorpus, CommentsAndBlankLinesIgnored) {
  const Corpus corpus = parse_corpus(
      "# a comment\n"
      "\n"
      "#doc d1\n"
      "# another comment\n"
      "sent=0\tsurface=inu\thead=common\n"
      "\n");
  ASSERT_EQ(corpus.documents.size(), 1u);
  EXPECT_EQ(corpus.documents[0].doc_id, "d1");
  ASSERT_EQ(corpus.documents[0].nps.size(), 1u);
}

TEST(ParseCorpus, FruitExampleRecord) {
  const Corpus corpus = parse_corpus(
      "#doc d\n"
      "sent=0\tsurface=kudamono\tparticle=wa\tpred_tense=nonpast\t"
      "pred_pos=adjective\thead=common\tembedded=past\t"
      "embedded_np=wareware:ga\tpron_in_mod=1\n");
  ASSERT_EQ(corpus.documents.size(), 1u);
  ASSERT_EQ(corpus.documents[0].nps.size(), 1u);
  const NPContext& np = corpus.documents[0].nps[0];
  EXPECT_EQ(np.surface, "kudamono");
  ASSERT_TRUE(np.particle.has_value());
  EXPECT_EQ(*np.particle, "wa");
  EXPECT_EQ(np.predicate_tense, Tense::nonpast);
  EXPECT_EQ(np.predicate_pos, PredicatePos::adjective);
  EXPECT_EQ(np.head_class, HeadClass::common);
  EXPECT_EQ(np.embedded_clause, EmbeddedClause::past);
  ASSERT_EQ(np.embedded_nps.size(), 1u);
  EXPECT_EQ(np.embedded_nps[0].surface, "wareware");
  EXPECT_EQ(np.embedded_nps[0].particle, "ga");
  EXPECT_TRUE(np.pronoun_in_modifier);
  // unmentioned attributes default to off/none/absent
  EXPECT_FALSE(np.demonstrative);
  EXPECT_FALSE(np.aru_modifier);
  EXPECT_FALSE(np.has_modifier);
  EXPECT_EQ(np.adverb_class, AdverbClass::none);
  EXPECT_FALSE(np.gold.has_value());
  EXPECT_EQ(np.np_index, 0);
  EXPECT_EQ(np.doc_id, "d");
}

TEST(ParseCorpus, GoldLabels) {
  const Corpus corpus = parse_corpus(
      "#doc d\n"
      "sent=0\tsurface=a\thead=common\tgold=indef\n"
      "sent=0\tsurface=b\thead=common\tgold=def\n"
      "sent=1\tsurface=c\thead=common\tgold=gen\n"
      "sent=1\tsurface=e\thead=common\tgold=other\n");
  const auto& nps = corpus.documents[0].nps;
  ASSERT_EQ(nps.size(), 4u);
  EXPECT_EQ(*nps[0].gold, GoldLabel::of(Category::indefinite));
  EXPECT_EQ(*nps[1].gold, GoldLabel::of(Category::definite));
  EXPECT_EQ(*nps[2].gold, GoldLabel::of(Category::generic));
  EXPECT_TRUE(nps[3].gold->other);
}

TEST(ParseCorpus, ErrorsNameTheLine) {
  const auto expect_error_line = [](const std::string& text, int line) {
    try {
      parse_corpus(text);
      FAIL() << "expected ParseError for: " << text;
    } catch (const ParseError& e) {
      EXPECT_EQ(e.line(), line) << e.what();
    }
  };
  // record before any #doc header
  expect_error_line("sent=0\tsurface=a\thead=common\n", 1);
  // unknown key
  expect_error_line("#doc d\nsent=0\tsurface=a\thead=common\tbogus=1\n", 2);
  // malformed field value
  expect_error_line("#doc d\nsent=x\tsurface=a\thead=common\n", 2);
  expect_error_line("#doc d\nsent=0\tsurface=a\thead=nounish\n", 2);
  expect_error_line("#doc d\nsent=0\tsurface=a\thead=common\tgold=maybe\n", 2);
  expect_error_line("#doc d\nsent=0\tsurface=a\thead=common\tmodifier=2\n", 2);
  // duplicate doc header
  expect_error_line("#doc d\n#doc d\n", 2);
  // missing required key
  expect_error_line("#doc d\nsurface=a\thead=common\n", 2);
  // duplicate key
  expect_error_line("#doc d\nsent=0\tsent=1\tsurface=a\thead=common\n", 2);
  // embedded NPs without an embedded clause
  expect_error_line(
      "#doc d\nsent=0\tsurface=a\thead=common\tembedded_np=x:ga\n", 2);
  // sentence index decreasing
  expect_error_line(
      "#doc d\nsent=3\tsurface=a\thead=common\nsent=1\tsurface=b\thead=common\n",
      3);
}

TEST(ParseCorpus, DeterministicAndRoundTrips) {
  const std::string text =
      "#doc folk/1\n"
      "sent=0\tsurface=inu\thead=common\tparticle=wa\tpred_tense=past\t"
      "pred_pos=verb\tgold=def\n"
      "sent=1\tsurface=hon\thead=common\tdemonstrative=1\tmodifier=1\t"
      "numeral=1\tadverb=generic\tgold=indef\n"
      "#doc folk/2\n"
      "sent=0\tsurface=kudamono\thead=common\tparticle=wa\tembedded=past\t"
      "embedded_np=wareware:ga\tembedded_np=hon:wo\tpron_in_mod=1\t"
      "modifier=1\tgold=gen\n";
  const Corpus first = parse_corpus(text);
  const Corpus second = parse_corpus(text);
  EXPECT_EQ(first, second);

  const std::string rewritten = write_corpus(first);
  const Corpus reparsed = parse_corpus(rewritten);
  EXPECT_EQ(first, reparsed);
  // canonical writer is a fixed point
  EXPECT_EQ(write_corpus(reparsed), rewritten);
}

TEST(ParseCorpus, ParsedCorpusValidatesCleanly) {
  const Corpus corpus = parse_corpus(
      "#doc a\n"
      "sent=0\tsurface=x\thead=common\n"
      "sent=0\tsurface=y\thead=proper\n"
      "sent=2\tsurface=z\thead=pronoun\n"
      "#doc b\n"
      "sent=5\tsurface=w\thead=common\tembedded=nonpast\tembedded_np=x:ga\n");
  EXPECT_TRUE(validate(corpus, false).empty());
}

TEST(Validate, WellFormedCorpusIsClean) {
  const Corpus corpus = parse_corpus(
      "#doc d\nsent=0\tsurface=a\thead=common\tgold=def\n");
  EXPECT_TRUE(validate(corpus, true).empty());
}

TEST(Validate, DecreasingSentenceIndexFlagged) {
  Corpus corpus = parse_corpus(
      "#doc d\n"
      "sent=1\tsurface=a\thead=common\n"
      "sent=1\tsurface=b\thead=common\n");
  corpus.documents[0].nps[1].sentence_index = 0;
  const auto diagnostics = validate(corpus, false);
  ASSERT_EQ(diagnostics.size(), 1u);
  EXPECT_EQ(diagnostics[0].kind, Diagnostic::Kind::ordering);
}

TEST(Validate, MissingGoldFlaggedOnlyWhenRequired) {
  const Corpus corpus = parse_corpus(
      "#doc d\n"
      "sent=0\tsurface=a\thead=common\tgold=def\n"
      "sent=0\tsurface=b\thead=common\n");
  EXPECT_TRUE(validate(corpus, false).empty());
  const auto diagnostics = validate(corpus, true);
  ASSERT_EQ(diagnostics.size(), 1u);
  EXPECT_EQ(diagnostics[0].kind, Diagnostic::Kind::missing_gold);
  EXPECT_NE(diagnostics[0].message.find("gold label required"),
            std::string::npos);
}

TEST(Validate, HandBuiltInvariantViolations) {
  Corpus corpus;
  corpus.documents.push_back(Document{"d", {}});
  corpus.documents.push_back(Document{"d", {}});  // duplicate id
  NPContext np;
  np.doc_id = "elsewhere";  // mismatched doc id
  np.surface = "x";
  np.embedded_nps.push_back({"y", "ga"});  // embedded NPs, no clause
  corpus.documents[0].nps.push_back(np);
  const auto diagnostics = validate(corpus, false);
  EXPECT_EQ(diagnostics.size(), 3u);
}

}  // namespace
}  // namespace refprop
