#include "doctest.h"

#include "stsg/errors.hpp"
#include "stsg/disambig.hpp"
#include "stsg/sat_oracle.hpp"
#include "test_support.hpp"

using namespace stsg;
using namespace stsg::testing;

TEST_CASE("brute force sat") {
  auto result = brute_force_sat(example_formula());
  CHECK(result.satisfiable);
  bool has_all_true = false;
  for (const auto& a : result.assignments) {
    if (a == std::vector<bool>{true, true, true}) has_all_true = true;
  }
  CHECK(has_all_true);

  CHECK(!brute_force_sat(unsatisfiable_formula()).satisfiable);

  Cnf3Formula tiny;
  tiny.variable_count = 1;
  tiny.clauses = {{1, 1, 1}};
  auto tiny_result = brute_force_sat(tiny);
  REQUIRE(tiny_result.assignments.size() == 1);
  CHECK(tiny_result.assignments[0] == std::vector<bool>{true});

  Cnf3Formula big;
  big.variable_count = 25;
  for (int i = 0; i < 8; ++i) {
    big.clauses.push_back({3 * i + 1, 3 * i + 2, 3 * i + 3});
  }
  big.clauses.push_back({25, 25, 25});
  CHECK_THROWS_AS(brute_force_sat(big), TooLarge);
}

TEST_CASE("assignment to sentence") {
  Cnf3Formula f = example_formula();
  CHECK(assignment_to_sentence(f, {true, true, true}) ==
        Sentence{"T", "F", "T", "F", "T", "F"});
  CHECK(assignment_to_sentence(f, {false, false, false}) ==
        Sentence{"F", "T", "F", "T", "F", "T"});
  // flipping u2 flips exactly its occurrence positions (2 and 5)
  Sentence flipped = assignment_to_sentence(f, {true, false, true});
  CHECK(flipped == Sentence{"T", "T", "T", "F", "F", "F"});
}

TEST_CASE("expected derivation counts") {
  Cnf3Formula f = example_formula();
  CHECK(expected_derivation_counts(f, {"T", "F", "T", "F", "T", "F"}) ==
        DerivationCounts{3, 2});
  CHECK(expected_derivation_counts(f, {"T", "T", "T", "T", "T", "T"}) ==
        DerivationCounts{0, 9});
  CHECK(expected_derivation_counts(f, {"F", "F", "F", "F", "F", "F"}) ==
        DerivationCounts{0, 0});
}

TEST_CASE("verification passes on the worked example") {
  auto report = verify_answer_preservation(example_formula());
  CHECK(report.all_pass());
  CHECK(report.max_probability == Rational(121, 4032));
  CHECK(report.threshold_q == Rational(119, 4032));
  CHECK(report.to_text() == verify_answer_preservation(example_formula()).to_text());
}

TEST_CASE("verification handles an unsatisfiable instance") {
  // (u1 v u1 v u1) ^ (-u1 v -u1 v -u1): padded contradiction, desk scale
  Cnf3Formula f;
  f.variable_count = 1;
  f.clauses = {{1, 1, 1}, {-1, -1, -1}};
  REQUIRE(!brute_force_sat(f).satisfiable);
  auto report = verify_answer_preservation(f);
  CHECK(report.all_pass());
  auto red = build_mppwg_reduction(f);
  CHECK(!decide_mppwg(red.grammar, red.word_graph, red.threshold_q));
  CHECK(!decide_mps(red.grammar, red.word_graph, red.threshold_q));

  // the full eight-clause contradiction still compiles and validates
  auto big = build_mppwg_reduction(unsatisfiable_formula());
  CHECK(validate_grammar(big.grammar).empty());
}

TEST_CASE("random formulas verify end to end") {
  std::mt19937_64 rng(2024);
  int satisfiable = 0, unsatisfiable = 0;
  for (int round = 0; round < 20; ++round) {
    Cnf3Formula f = random_formula(rng, 4, 4);
    CHECK_NOTHROW(validate_formula(f));
    auto report = verify_answer_preservation(f);
    if (!report.all_pass()) {
      FAIL(("verification failed:\n" + report.to_text() + "formula:\n" + format_dimacs(f)));
    }
    (brute_force_sat(f).satisfiable ? satisfiable : unsatisfiable)++;
  }
  CHECK(satisfiable + unsatisfiable == 20);
}
