#pragma once

#include <random>
#include <string>
#include <vector>

#include "stsg/reduction.hpp"

namespace stsg {

struct SatResult {
  bool satisfiable = false;
  std::vector<std::vector<bool>> assignments;  // index 0 holds variable 1
};

// Exhaustive over the 2^n assignments; throws TooLarge for n > 24.
SatResult brute_force_sat(const Cnf3Formula& f);

bool clause_satisfied(const std::array<int, 3>& clause, const std::vector<bool>& a);

// Position 3(k-1)+j carries the truth value of literal d_kj under a.
Sentence assignment_to_sentence(const Cnf3Formula& f, const std::vector<bool>& a);

struct DerivationCounts {
  BigInt first_type;
  BigInt second_type;
  friend bool operator==(const DerivationCounts&, const DerivationCounts&) = default;
};

// Closed-form gadget derivation counts for a sentence in {T,F}^{3m}.
DerivationCounts expected_derivation_counts(const Cnf3Formula& f, const Sentence& s);

struct VerificationReport {
  struct Check {
    std::string name;
    bool pass;
    std::string detail;
  };
  std::vector<Check> checks;
  Rational max_probability;
  Rational threshold_q;

  bool all_pass() const;
  std::string to_text() const;
};

// End-to-end check that the compiled gadgets preserve the SAT answer.
VerificationReport verify_answer_preservation(const Cnf3Formula& f);

// Uniform distinct clauses; every variable forced to occur.
Cnf3Formula random_formula(std::mt19937_64& rng, int max_variables, int max_clauses);

}  // namespace stsg
