#include "doctest.h"

#include <algorithm>
#include <map>
#include <set>

#include "stsg/errors.hpp"
#include "stsg/forest.hpp"
#include "stsg/reduction.hpp"
#include "test_support.hpp"

using namespace stsg;
using namespace stsg::testing;

TEST_CASE("sentences_of enumerates the cartesian product") {
  WordGraph wg{{{"T", "F"}, {"T", "F"}}};
  auto sentences = sentences_of(wg);
  REQUIRE(sentences.size() == 4);
  CHECK(sentences[0] == Sentence{"T", "T"});
  CHECK(sentences[1] == Sentence{"T", "F"});
  CHECK(sentences[2] == Sentence{"F", "T"});
  CHECK(sentences[3] == Sentence{"F", "F"});

  WordGraph cube;
  cube.positions.assign(6, {"T", "F"});
  CHECK(sentence_count(cube) == 64);
  CHECK(sentences_of(cube).size() == 64);
  CHECK_THROWS_AS(sentences_of(cube, 10), CapExceeded);

  WordGraph single = WordGraph::from_sentence({"a", "b"});
  auto one = sentences_of(single);
  REQUIRE(one.size() == 1);
  CHECK(one[0] == Sentence{"a", "b"});
}

TEST_CASE("word-graph text round trip") {
  WordGraph wg{{{"T", "F"}, {"T"}}};
  WordGraph parsed = parse_wordgraph_text(format_wordgraph(wg));
  CHECK(parsed.positions == wg.positions);
  CHECK_THROWS_AS(parse_wordgraph_text("T F\n"), TextParseError);
  CHECK_THROWS_AS(parse_wordgraph_text("positions 2\nT F\n"), TextParseError);
}

TEST_CASE("single-rule forest has one derivation") {
  Stsg g = toy_grammar(
      "start S\nnonterminal S\nterminal a\ntree t0 1/1 (S a)\n");
  auto f = build_forest(g, WordGraph{{{"a"}}});
  REQUIRE(!f.empty());
  CHECK(count_derivations(f) == 1);
  auto derivs = enumerate_derivations(g, f);
  REQUIRE(derivs.size() == 1);
  CHECK(derivs[0].first.tree_ids == std::vector<std::string>{"t0"});
  CHECK(derivs[0].second == 1);
}

TEST_CASE("unmatched sentence yields an empty flagged forest") {
  Stsg g = toy_grammar(
      "start S\nnonterminal S\nterminal a b\ntree t0 1/1 (S a)\n");
  auto f = build_forest(g, WordGraph{{{"b"}}});
  CHECK(f.empty());
  CHECK(count_derivations(f) == 0);
  CHECK(enumerate_derivations(g, f).empty());
  CHECK(enumerate_parses(g, f).empty());
  CHECK(inside_mass(g, f) == 0);
}

TEST_CASE("gadget forest matches per-sentence brute force") {
  auto red = build_mppwg_reduction(example_formula());
  auto f = build_forest(red.grammar, red.word_graph);
  auto derivs = enumerate_derivations(red.grammar, f);
  CHECK(BigInt(derivs.size()) == count_derivations(f));

  // multiset of (yield, derivation) pairs versus the top-down oracle
  std::map<Sentence, std::multiset<std::vector<std::string>>> forest_side;
  for (const auto& [d, p] : derivs) {
    forest_side[yield_of(red.grammar, derive(red.grammar, d))].insert(d.tree_ids);
  }
  std::map<Sentence, std::multiset<std::vector<std::string>>> oracle_side;
  BigInt oracle_count = 0;
  for (const auto& s : sentences_of(red.word_graph)) {
    for (const auto& [d, p] : brute_force_derivations(red.grammar, s, s.size())) {
      oracle_side[s].insert(d.tree_ids);
      ++oracle_count;
    }
  }
  CHECK(forest_side == oracle_side);
  CHECK(oracle_count == count_derivations(f));
}

TEST_CASE("gadget derivation counts per sentence") {
  auto red = build_mppwg_reduction(example_formula());

  auto count_for = [&](const Sentence& s) {
    auto f = build_forest(red.grammar, WordGraph::from_sentence(s));
    int first = 0, second = 0;
    for (const auto& [d, p] : enumerate_derivations(red.grammar, f)) {
      (classify_derivation(red, d) == DerivationType::FirstType ? first : second)++;
    }
    return std::pair{first, second};
  };
  CHECK(count_for({"T", "F", "T", "F", "T", "F"}) == std::pair{3, 2});
  CHECK(count_for({"T", "T", "T", "T", "T", "T"}) == std::pair{0, 9});
  CHECK(count_for({"F", "F", "F", "F", "F", "F"}) == std::pair{0, 0});
}

TEST_CASE("gadget sentences have exactly one parse") {
  auto red = build_mppwg_reduction(example_formula());
  auto f = build_forest(red.grammar, WordGraph::from_sentence(
                                         {"T", "F", "T", "F", "T", "F"}));
  auto parses = enumerate_parses(red.grammar, f);
  REQUIRE(parses.size() == 1);
  CHECK(parses[0].second.size() == 5);
}

TEST_CASE("ambiguous toy grammar groups derivations under one parse") {
  Stsg g = toy_grammar(
      "start S\n"
      "nonterminal S A\n"
      "terminal a\n"
      "tree t0 1/2 (S (A a) a)\n"
      "tree t1 1/2 (S A a)\n"
      "tree t2 1/1 (A a)\n");
  auto f = build_forest(g, WordGraph::from_sentence({"a", "a"}));
  CHECK(count_derivations(f) == 2);
  auto parses = enumerate_parses(g, f);
  REQUIRE(parses.size() == 1);
  CHECK(format_tree(parses[0].first) == "(S (A a) a)");
  CHECK(parses[0].second.size() == 2);
}

TEST_CASE("cap exceeded reports the exact count") {
  auto red = build_mppwg_reduction(example_formula());
  auto f = build_forest(red.grammar, red.word_graph);
  BigInt total = count_derivations(f);
  try {
    enumerate_derivations(red.grammar, f, 10);
    FAIL("expected CapExceeded");
  } catch (const CapExceeded& e) {
    CHECK(e.exact_count == total);
  }
}

TEST_CASE("probability conservation over the full word-graph") {
  std::mt19937_64 rng(7);
  for (int round = 0; round < 20; ++round) {
    Stsg g = random_stsg(rng);
    for (size_t len = 1; len <= 4; ++len) {
      WordGraph wg;
      wg.positions.assign(len, {"a", "b", "c"});
      auto f = build_forest(g, wg);
      Rational forest_mass = inside_mass(g, f);
      Rational oracle_mass = 0;
      for (const auto& [d, p] : brute_force_derivations(g, std::nullopt, len)) {
        oracle_mass += p;
      }
      CHECK(forest_mass == oracle_mass);
      CHECK(forest_mass <= 1);
    }
  }
}

TEST_CASE("forest soundness on random grammars") {
  std::mt19937_64 rng(11);
  for (int round = 0; round < 15; ++round) {
    Stsg g = random_stsg(rng);
    WordGraph wg;
    wg.positions.assign(3, {"a", "b"});
    auto f = build_forest(g, wg);
    std::multiset<std::vector<std::string>> forest_side, oracle_side;
    for (const auto& [d, p] : enumerate_derivations(g, f)) {
      forest_side.insert(d.tree_ids);
    }
    for (const auto& s : sentences_of(wg)) {
      for (const auto& [d, p] : brute_force_derivations(g, s, s.size())) {
        oracle_side.insert(d.tree_ids);
      }
    }
    CHECK(forest_side == oracle_side);
  }
}

TEST_CASE("yield masses agree with enumeration") {
  auto red = build_mppwg_reduction(example_formula());
  auto f = build_forest(red.grammar, red.word_graph);
  std::map<Sentence, Rational> expected;
  for (const auto& [d, p] : enumerate_derivations(red.grammar, f)) {
    expected[yield_of(red.grammar, derive(red.grammar, d))] += p;
  }
  auto masses = yield_masses(red.grammar, f);
  REQUIRE(masses.size() == expected.size());
  for (const auto& m : masses) {
    CHECK(m.probability == expected.at(m.yield));
  }
}

TEST_CASE("unary cycles are rejected") {
  Stsg g = parse_grammar_text(
      "start S\n"
      "nonterminal S A\n"
      "terminal a\n"
      "tree t0 1/2 (S A)\n"
      "tree t1 1/2 (S a)\n"
      "tree t2 1/2 (A S)\n"
      "tree t3 1/2 (A a)\n");
  CHECK_THROWS_AS(build_forest(g, WordGraph{{{"a"}}}), CyclicForest);
}
