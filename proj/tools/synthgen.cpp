// Generates the bundled synthetic corpora. Attributes are sampled from a
// fixed distribution; gold labels are drawn from a log-linear model over the
// conditions of the shipped rule file, with a class prior tuned for a
// roughly 29/58/13 indefinite/definite/generic split. Deterministic for a
// given seed; the checked-in corpora were produced by this tool.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "refprop/corpus.hpp"
#include "refprop/maxent.hpp"
#include "refprop/rules.hpp"

namespace {

using namespace refprop;

// True per-condition category preferences of the generator, as normalized
// factors; the gold distribution of an NP is the normalized product of the
// factors of its fired rules and the class prior.
const std::map<std::string, PerCategory<double>> kConditionals = {
    {"demonstrative", {{0.02, 0.96, 0.02}}},
    {"wa_past", {{0.18, 0.67, 0.15}}},
    {"wa_nonpast", {{0.31, 0.29, 0.40}}},
    {"embedded_past", {{0.31, 0.50, 0.19}}},
    {"embedded_def_subj", {{0.19, 0.62, 0.19}}},
    {"embedded_def_particle", {{0.02, 0.80, 0.18}}},
    {"pronoun_in_modifier", {{0.20, 0.43, 0.37}}},
    {"adjective_predicate", {{0.13, 0.80, 0.07}}},
    {"common_noun", {{0.72, 0.14, 0.14}}},
    {"ga_marked", {{0.62, 0.21, 0.17}}},
    {"aru_modifier", {{0.9995, 0.00025, 0.00025}}},
    {"pronoun_head", {{0.0005, 0.999, 0.0005}}},
    {"wa_no_modifier", {{0.03, 0.26, 0.71}}},
};

const PerCategory<double> kPrior = {{0.30, 0.48, 0.22}};

const std::vector<std::string> kNouns = {
    "hon",    "inu",    "kudamono", "neko",   "kuruma", "gakusei",
    "sensei", "yama",   "kawa",     "machi",  "hito",   "kodomo",
    "ringo",  "sakana", "tori",     "ie",     "michi",  "hana",
    "tsuki",  "umi",    "mura",     "shima",  "mori",   "ishi"};

const std::vector<std::string> kPronouns = {"wareware", "watashi", "kare",
                                            "kanojo", "karera"};

struct Generator {
  std::mt19937 rng;
  const RuleSet& rules;
  double other_rate = 0.0;

  double uniform() { return std::uniform_real_distribution<double>(0, 1)(rng); }
  bool chance(double p) { return uniform() < p; }

  template <typename T>
  const T& pick(const std::vector<T>& xs) {
    return xs[std::uniform_int_distribution<std::size_t>(0, xs.size() - 1)(rng)];
  }

  NPContext sample_attributes(int sentence) {
    NPContext np;
    np.sentence_index = sentence;

    const double head_roll = uniform();
    np.head_class = head_roll < 0.10   ? HeadClass::pronoun
                    : head_roll < 0.14 ? HeadClass::proper
                                       : HeadClass::common;
    np.surface = np.head_class == HeadClass::pronoun ? pick(kPronouns)
                                                     : pick(kNouns);

    const double particle_roll = uniform();
    if (particle_roll < 0.38)
      np.particle = "wa";
    else if (particle_roll < 0.62)
      np.particle = "ga";
    else if (particle_roll < 0.82)
      np.particle = "wo";
    // else no particle

    const double tense_roll = uniform();
    np.predicate_tense = tense_roll < 0.40   ? Tense::past
                         : tense_roll < 0.90 ? Tense::nonpast
                                             : Tense::none;
    const double pos_roll = uniform();
    np.predicate_pos = pos_roll < 0.50   ? PredicatePos::verb
                       : pos_roll < 0.75 ? PredicatePos::adjective
                       : pos_roll < 0.95 ? PredicatePos::copula
                                         : PredicatePos::none;

    if (np.head_class == HeadClass::common) {
      np.demonstrative = chance(0.08);
      if (!np.demonstrative) np.aru_modifier = chance(0.07);
    }
    np.numeral_modifier = chance(0.05);

    const double emb_roll = uniform();
    np.embedded_clause = emb_roll < 0.70   ? EmbeddedClause::none
                         : emb_roll < 0.88 ? EmbeddedClause::past
                                           : EmbeddedClause::nonpast;
    return np;
  }

  void sample_embedded_nps(NPContext& np, const std::vector<std::string>& recent) {
    if (np.embedded_clause == EmbeddedClause::none) return;
    const int count = chance(0.35) ? 2 : 1;
    for (int i = 0; i < count; ++i) {
      EmbeddedNP e;
      if (!recent.empty() && chance(0.55)) {
        e.surface = pick(recent);
      } else if (chance(0.30)) {
        e.surface = pick(kPronouns);
      } else {
        e.surface = pick(kNouns);
      }
      const double p = uniform();
      e.particle = p < 0.40 ? "ga" : p < 0.60 ? "wa" : p < 0.85 ? "wo" : "ni";
      np.embedded_nps.push_back(std::move(e));
    }
  }

  Document make_document(const std::string& doc_id, int sentences) {
    Document doc;
    doc.doc_id = doc_id;
    DiscourseStore store;
    std::vector<std::string> recent;

    for (int s = 0; s < sentences; ++s) {
      const int nps = 1 + static_cast<int>(uniform() * 3.0);
      for (int k = 0; k < nps; ++k) {
        NPContext np = sample_attributes(s);
        np.doc_id = doc_id;
        np.np_index = static_cast<int>(doc.nps.size());
        sample_embedded_nps(np, recent);

        bool pron_from_embedded = false;
        for (const auto& e : np.embedded_nps) {
          for (const auto& p : kPronouns) {
            if (e.surface == p) pron_from_embedded = true;
          }
        }
        np.pronoun_in_modifier = pron_from_embedded;
        np.has_modifier = np.demonstrative || np.aru_modifier ||
                          np.numeral_modifier || np.pronoun_in_modifier ||
                          np.embedded_clause != EmbeddedClause::none ||
                          chance(0.12);

        const auto fired = fire_rules(np, store, rules);
        PerCategory<double> logit;
        for (Category c : kAllCategories) logit[c] = std::log(kPrior[c]);
        for (const auto& id : fired) {
          const auto it = kConditionals.find(id);
          if (it == kConditionals.end()) {
            std::fprintf(stderr, "no conditional for rule '%s'\n", id.c_str());
            std::exit(1);
          }
          for (Category c : kAllCategories) logit[c] += std::log(it->second[c]);
        }
        const auto probs = refprop::detail::softmax(logit);
        const double roll = uniform();
        Category gold = Category::generic;
        double acc = 0.0;
        for (Category c : kAllCategories) {
          acc += probs[c];
          if (roll < acc) {
            gold = c;
            break;
          }
        }

        // Occasional "other" annotations, but never on the deterministic
        // aru/pronoun contexts.
        if (!np.aru_modifier && np.head_class != HeadClass::pronoun &&
            chance(other_rate)) {
          np.gold = GoldLabel::ambiguous();
        } else {
          np.gold = GoldLabel::of(gold);
          store.assign(np.surface, gold, np.sentence_index);
          recent.push_back(np.surface);
          if (recent.size() > 8) recent.erase(recent.begin());
        }
        doc.nps.push_back(std::move(np));
      }
    }
    return doc;
  }
};

void report(const char* name, const Corpus& corpus) {
  PerCategory<long> counts{{0, 0, 0}};
  long other = 0, aru_bad = 0, pron_bad = 0, gen_total = 0;
  for (const auto& doc : corpus.documents) {
    for (const auto& np : doc.nps) {
      if (np.gold->other) {
        ++other;
        continue;
      }
      counts[np.gold->category] += 1;
      if (np.gold->category == Category::generic) ++gen_total;
      if (np.aru_modifier && np.gold->category != Category::indefinite)
        ++aru_bad;
      if (np.head_class == HeadClass::pronoun &&
          np.gold->category != Category::definite)
        ++pron_bad;
    }
  }
  const double total = static_cast<double>(counts[Category::indefinite] +
                                           counts[Category::definite] +
                                           counts[Category::generic]);
  std::printf("%s: %zu NPs  indef=%.3f def=%.3f gen=%.3f other=%ld gen_n=%ld\n",
              name, corpus.np_count(), counts[Category::indefinite] / total,
              counts[Category::definite] / total,
              counts[Category::generic] / total, other, gen_total);
  if (aru_bad > 0 || pron_bad > 0) {
    std::fprintf(stderr,
                 "invariant violated: aru!=indef %ld, pronoun!=def %ld; pick "
                 "another seed\n",
                 aru_bad, pron_bad);
    std::exit(1);
  }
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 4) {
    std::fprintf(stderr, "usage: %s <rules> <train_out> <test_out> [seed]\n",
                 argv[0]);
    return 1;
  }
  const std::string rules_path = argv[1];
  const std::string train_out = argv[2];
  const std::string test_out = argv[3];
  const unsigned seed = argc > 4 ? static_cast<unsigned>(std::stoul(argv[4]))
                                 : 424242u;

  std::ifstream in(rules_path);
  if (!in) {
    std::fprintf(stderr, "cannot open '%s'\n", rules_path.c_str());
    return 1;
  }
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  const RuleSet rules = load_rules(text);

  Generator gen{std::mt19937{seed}, rules};

  Corpus train_corpus;
  gen.other_rate = 0.012;
  train_corpus.documents.push_back(gen.make_document("folk/01", 14));
  train_corpus.documents.push_back(gen.make_document("folk/02", 13));
  train_corpus.documents.push_back(gen.make_document("folk/03", 14));
  train_corpus.documents.push_back(gen.make_document("essay/01", 12));
  train_corpus.documents.push_back(gen.make_document("essay/02", 13));
  train_corpus.documents.push_back(gen.make_document("news/01", 12));

  Corpus test_corpus;
  gen.other_rate = 0.010;
  test_corpus.documents.push_back(gen.make_document("folk/11", 14));
  test_corpus.documents.push_back(gen.make_document("essay/11", 12));
  test_corpus.documents.push_back(gen.make_document("news/11", 12));

  report("train", train_corpus);
  report("test", test_corpus);

  std::ofstream(train_out) << write_corpus(train_corpus);
  std::ofstream(test_out) << write_corpus(test_corpus);
  std::printf("wrote %s and %s (seed %u)\n", train_out.c_str(),
              test_out.c_str(), seed);
  return 0;
}
