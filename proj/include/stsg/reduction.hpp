#pragma once

#include <array>
#include <string>
#include <vector>

#include "stsg/grammar.hpp"
#include "stsg/wordgraph.hpp"

namespace stsg {

// 3CNF formula; a literal is +i or -i for variable index i in 1..n.
struct Cnf3Formula {
  int variable_count = 0;
  std::vector<std::array<int, 3>> clauses;

  int clause_count() const { return static_cast<int>(clauses.size()); }
};

// Throws InvalidFormula on any violated invariant.
void validate_formula(const Cnf3Formula& f);

Cnf3Formula parse_dimacs(const std::string& text);
std::string format_dimacs(const Cnf3Formula& f);

// Occurrences of both literals of each variable; index 0 holds n_1.
std::vector<int> occurrence_counts(const Cnf3Formula& f);

struct ThetaBounds {
  Rational lower;
  Rational upper;
};
ThetaBounds theta_bounds(const Cnf3Formula& f);

// Midpoint of the open interval.
Rational choose_theta(const ThetaBounds& bounds);

struct ReductionOutput {
  Stsg grammar;
  WordGraph word_graph;  // {T,F}^{3m}
  Rational theta;
  Rational threshold_q;
  Rational p_zero;
  std::vector<int> occurrence_counts;
  Rational first_type_probability;   // theta (1/2)^{3m}
  Rational second_type_probability;  // p0 (1/2)^{2m} (1/3)^m
};
ReductionOutput build_mppwg_reduction(const Cnf3Formula& f);

enum class DerivationType { FirstType, SecondType };
DerivationType classify_derivation(const ReductionOutput& out, const Derivation& d);

struct MppReduction {
  Stsg grammar;
  Sentence sentence;  // v1_1 v1_2 ... vm_3
  Rational theta;
  Rational threshold_q;
  Rational p_zero;
};
MppReduction build_mpp_reduction(const Cnf3Formula& f);

// Flattens each elementary tree to the depth-1 production root -> frontier,
// keeping ids and probabilities. Throws DuplicateProduction when two distinct
// trees flatten to the same production.
Stsg flatten_to_scfg(const Stsg& g);

// Gadget symbol names.
std::string literal_name(int literal);          // "u3" / "nu3"
std::string clause_name(int clause_index);      // 1-based "C2"
std::string position_terminal(int k, int j);    // 1-based "v2_1"

}  // namespace stsg
