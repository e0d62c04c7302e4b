#include "doctest.h"

#include <map>
#include <set>

#include "stsg/disambig.hpp"
#include "stsg/errors.hpp"
#include "stsg/reduction.hpp"
#include "stsg/sat_oracle.hpp"
#include "test_support.hpp"

using namespace stsg;
using namespace stsg::testing;

TEST_CASE("mpd on toy and gadget grammars") {
  Stsg g = toy_grammar(
      "start S\nnonterminal S\nterminal a\ntree t0 1/1 (S a)\n");
  auto r = mpd(g, WordGraph{{{"a"}}});
  REQUIRE(r.has_value());
  CHECK(r->derivation.tree_ids == std::vector<std::string>{"t0"});
  CHECK(r->probability == 1);

  auto red = build_mppwg_reduction(example_formula());
  auto best = mpd(red.grammar, red.word_graph);
  REQUIRE(best.has_value());
  CHECK(best->probability == Rational(13, 1344));
  CHECK(classify_derivation(red, best->derivation) == DerivationType::FirstType);

  CHECK(!mpd(g, WordGraph{{{"a"}, {"a"}}}).has_value());
}

TEST_CASE("mpd tie-break picks the lowest tree-id sequence") {
  Stsg g = toy_grammar(
      "start S\n"
      "nonterminal S\n"
      "terminal a b\n"
      "tree t0 1/2 (S a)\n"
      "tree t1 1/2 (S b)\n");
  WordGraph wg{{{"a", "b"}}};
  auto r = mpd(g, wg);
  REQUIRE(r.has_value());
  CHECK(r->derivation.tree_ids == std::vector<std::string>{"t0"});
  // deterministic across repeated calls
  CHECK(mpd(g, wg)->derivation == r->derivation);
}

TEST_CASE("mpd equals brute-force maximum on random grammars") {
  std::mt19937_64 rng(23);
  for (int round = 0; round < 20; ++round) {
    Stsg g = random_stsg(rng);
    WordGraph wg;
    wg.positions.assign(3, {"a", "b", "c"});
    auto derivs = brute_force_derivations(g, std::nullopt, 3);
    auto r = mpd(g, wg);
    if (derivs.empty()) {
      CHECK(!r.has_value());
      continue;
    }
    Rational best = 0;
    for (const auto& [d, p] : derivs) best = std::max(best, p);
    REQUIRE(r.has_value());
    CHECK(r->probability == best);
  }
}

TEST_CASE("sentence probability") {
  auto red = build_mppwg_reduction(example_formula());
  CHECK(sentence_probability(red.grammar, {"T", "F", "T", "F", "T", "F"}) ==
        Rational(121, 4032));
  CHECK(sentence_probability(red.grammar, {"F", "F", "F", "F", "F", "F"}) == 0);
  CHECK(sentence_probability(red.grammar, {"T", "T"}) == 0);
}

TEST_CASE("parse probability matches sentence probability on gadget parses") {
  auto red = build_mppwg_reduction(example_formula());
  Sentence s{"T", "F", "T", "F", "T", "F"};
  auto f = build_forest(red.grammar, WordGraph::from_sentence(s));
  auto parses = enumerate_parses(red.grammar, f);
  REQUIRE(parses.size() == 1);
  CHECK(parse_probability(red.grammar, parses[0].first) == Rational(121, 4032));
}

TEST_CASE("parse probability on depth-1 grammars is the rule product") {
  Stsg g = toy_grammar(
      "start S\n"
      "nonterminal S A\n"
      "terminal a b\n"
      "tree t0 1/1 (S A b)\n"
      "tree t1 2/3 (A a)\n"
      "tree t2 1/3 (A b)\n");
  CHECK(parse_probability(g, parse_tree_text("(S (A a) b)")) == Rational(2, 3));
  CHECK(parse_probability(g, parse_tree_text("(S (A b) b)")) == Rational(1, 3));
  // underivable parse
  CHECK(parse_probability(g, parse_tree_text("(S (A a) a)")) == 0);
}

TEST_CASE("parse probability equals enumeration sums on random grammars") {
  std::mt19937_64 rng(31);
  for (int round = 0; round < 20; ++round) {
    Stsg g = random_stsg(rng);
    for (size_t len = 1; len <= 4; ++len) {
      auto derivs = brute_force_derivations(g, std::nullopt, len);
      std::map<std::string, std::pair<TreeNode, Rational>> by_parse;
      std::map<Sentence, Rational> by_yield;
      for (const auto& [d, p] : derivs) {
        TreeNode parse = derive(g, d);
        auto [it, fresh] =
            by_parse.emplace(format_tree(parse), std::make_pair(parse, Rational(0)));
        it->second.second += p;
        by_yield[yield_of(g, parse)] += p;
      }
      for (const auto& [key, entry] : by_parse) {
        CHECK(parse_probability(g, entry.first) == entry.second);
      }
      for (const auto& [s, mass] : by_yield) {
        CHECK(sentence_probability(g, s) == mass);
      }
    }
  }
}

TEST_CASE("exact mpp and mps on the gadget word-graph") {
  Cnf3Formula formula = example_formula();
  auto red = build_mppwg_reduction(formula);
  std::set<Sentence> satisfying_sentences;
  for (const auto& a : brute_force_sat(formula).assignments) {
    satisfying_sentences.insert(assignment_to_sentence(formula, a));
  }

  auto mpp = mpp_exact(red.grammar, red.word_graph);
  REQUIRE(mpp.has_value());
  CHECK(mpp->probability == Rational(121, 4032));
  CHECK(satisfying_sentences.count(yield_of(red.grammar, mpp->parse)) == 1);

  auto mps = mps_exact(red.grammar, red.word_graph);
  REQUIRE(mps.has_value());
  CHECK(mps->probability == Rational(121, 4032));
  CHECK(satisfying_sentences.count(mps->sentence) == 1);

  // singleton word-graph: the one sentence
  auto single = mps_exact(red.grammar,
                          WordGraph::from_sentence({"T", "F", "T", "F", "T", "F"}));
  REQUIRE(single.has_value());
  CHECK(single->probability == Rational(121, 4032));

  Stsg empty_g = toy_grammar(
      "start S\nnonterminal S\nterminal a\ntree t0 1/1 (S a)\n");
  CHECK(!mpp_exact(empty_g, WordGraph{{{"a"}, {"a"}}}).has_value());
  CHECK(!mps_exact(empty_g, WordGraph{{{"a"}, {"a"}}}).has_value());
}

TEST_CASE("decision procedures compare exactly against the threshold") {
  auto red = build_mppwg_reduction(example_formula());
  CHECK(decide_mppwg(red.grammar, red.word_graph, Rational(119, 4032)));
  CHECK(decide_mps(red.grammar, red.word_graph, Rational(119, 4032)));
  CHECK(decide_mppwg(red.grammar, red.word_graph, Rational(121, 4032)));
  CHECK(!decide_mppwg(red.grammar, red.word_graph,
                      Rational(121, 4032) + Rational(1, 1000000)));
  // q = 1 on an ambiguous grammar
  Stsg g = toy_grammar(
      "start S\n"
      "nonterminal S\n"
      "terminal a b\n"
      "tree t0 1/2 (S a)\n"
      "tree t1 1/2 (S b)\n");
  CHECK(!decide_mps(g, WordGraph{{{"a", "b"}}}, Rational(1)));
  CHECK(decide_mpp(g, {"a"}, Rational(1, 2)));
}

TEST_CASE("monte carlo sampling") {
  Stsg g = toy_grammar(
      "start S\nnonterminal S\nterminal a\ntree t0 1/1 (S a)\n");
  auto r = monte_carlo_mpp(g, WordGraph{{{"a"}}}, 100, 42);
  CHECK(r.frequency == 1.0);
  CHECK(format_tree(r.parse) == "(S a)");

  auto red = build_mppwg_reduction(example_formula());
  auto a = monte_carlo_mpp(red.grammar, red.word_graph, 2000, 7);
  auto b = monte_carlo_mpp(red.grammar, red.word_graph, 2000, 7);
  CHECK(format_tree(a.parse) == format_tree(b.parse));
  CHECK(a.frequency == b.frequency);

  Stsg mismatch = toy_grammar(
      "start S\nnonterminal S\nterminal a b\ntree t0 1/1 (S a)\n");
  auto f = build_forest(mismatch, WordGraph{{{"b"}}});
  CHECK_THROWS_AS(sample_derivations(mismatch, f, 10, 1), EmptyForest);
}

TEST_CASE("sampling distribution matches derivation probabilities") {
  // three derivations of "a b" with probabilities 1/2, 1/4, 1/4
  Stsg g = toy_grammar(
      "start S\n"
      "nonterminal S A B\n"
      "terminal a b\n"
      "tree t1 1/2 (S A b)\n"
      "tree t2 1/4 (S a B)\n"
      "tree t3 1/4 (S a b)\n"
      "tree ta 1/1 (A a)\n"
      "tree tb 1/1 (B b)\n");
  auto f = build_forest(g, WordGraph::from_sentence({"a", "b"}));
  CHECK(count_derivations(f) == 3);
  const std::int64_t samples = 30000;
  auto counts = sample_derivations(g, f, samples, 97);
  std::map<std::vector<std::string>, double> expected = {
      {{"t1", "ta"}, 0.5}, {{"t2", "tb"}, 0.25}, {{"t3"}, 0.25}};
  REQUIRE(counts.size() == 3);
  double chi2 = 0;
  for (const auto& [ids, share] : expected) {
    double exp_count = share * static_cast<double>(samples);
    double diff = static_cast<double>(counts.at(ids)) - exp_count;
    chi2 += diff * diff / exp_count;
  }
  CHECK(chi2 < 9.21);  // 1% critical value, 2 degrees of freedom
}

TEST_CASE("collapse transform") {
  // no tree composable from smaller trees: probabilities unchanged
  Stsg flat = toy_grammar(
      "start S\n"
      "nonterminal S A\n"
      "terminal a b\n"
      "tree t0 1/1 (S A b)\n"
      "tree t1 2/3 (A a)\n"
      "tree t2 1/3 (A b)\n");
  Stsg collapsed = collapse_transform(flat);
  for (size_t i = 0; i < flat.trees.size(); ++i) {
    CHECK(collapsed.trees[i].probability == flat.trees[i].probability);
  }

  // documented three-tree example: weights 1/2 and 1, normalized 1/3 and 2/3
  Stsg g = toy_grammar(
      "start S\n"
      "nonterminal S A\n"
      "terminal a b\n"
      "tree T1 1/2 (S A b)\n"
      "tree T3 1/2 (S (A a) b)\n"
      "tree T2 1/1 (A a)\n");
  Stsg c = collapse_transform(g);
  CHECK(c.find_tree("T1")->probability == Rational(1, 3));
  CHECK(c.find_tree("T3")->probability == Rational(2, 3));
  CHECK(c.find_tree("T2")->probability == 1);
  CHECK(validate_grammar(c).empty());
}

TEST_CASE("collapsed gadget grammar still validates") {
  auto red = build_mppwg_reduction(example_formula());
  CHECK(validate_grammar(collapse_transform(red.grammar)).empty());
}

TEST_CASE("mpd as mpp proxy") {
  // unique derivation per parse: proxy equals exact mpp
  Stsg g = toy_grammar(
      "start S\n"
      "nonterminal S A\n"
      "terminal a b\n"
      "tree t0 1/1 (S A b)\n"
      "tree t1 2/3 (A a)\n"
      "tree t2 1/3 (A b)\n");
  WordGraph wg{{{"a", "b"}, {"b"}}};
  auto proxy = mpd_as_mpp_proxy(g, wg);
  auto exact = mpp_exact(g, wg);
  REQUIRE(proxy.has_value());
  REQUIRE(exact.has_value());
  CHECK(format_tree(proxy->parse) == format_tree(exact->parse));
  CHECK(proxy->probability == exact->probability);

  CHECK(!mpd_as_mpp_proxy(g, WordGraph{{{"a"}}}).has_value());
}
