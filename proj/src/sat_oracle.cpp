#include "stsg/sat_oracle.hpp"

#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "stsg/disambig.hpp"
#include "stsg/errors.hpp"
#include "stsg/forest.hpp"

namespace stsg {

bool clause_satisfied(const std::array<int, 3>& clause, const std::vector<bool>& a) {
  for (int lit : clause) {
    bool value = a[static_cast<size_t>(std::abs(lit)) - 1];
    if ((lit > 0) == value) return true;
  }
  return false;
}

SatResult brute_force_sat(const Cnf3Formula& f) {
  validate_formula(f);
  if (f.variable_count > 24) {
    throw TooLarge("brute-force SAT supports at most 24 variables, got " +
                   std::to_string(f.variable_count));
  }
  SatResult result;
  const int n = f.variable_count;
  for (std::uint32_t bits = 0; bits < (1u << n); ++bits) {
    std::vector<bool> a(n);
    for (int i = 0; i < n; ++i) a[i] = (bits >> i) & 1u;
    bool ok = true;
    for (const auto& clause : f.clauses) {
      if (!clause_satisfied(clause, a)) {
        ok = false;
        break;
      }
    }
    if (ok) result.assignments.push_back(std::move(a));
  }
  result.satisfiable = !result.assignments.empty();
  return result;
}

Sentence assignment_to_sentence(const Cnf3Formula& f, const std::vector<bool>& a) {
  Sentence s;
  for (const auto& clause : f.clauses) {
    for (int lit : clause) {
      bool value = a[static_cast<size_t>(std::abs(lit)) - 1];
      s.push_back((lit > 0) == value ? "T" : "F");
    }
  }
  return s;
}

DerivationCounts expected_derivation_counts(const Cnf3Formula& f, const Sentence& s) {
  const int m = f.clause_count();
  if (s.size() != static_cast<size_t>(3 * m)) {
    throw InvalidFormula("sentence length " + std::to_string(s.size()) + " does not match 3m");
  }
  DerivationCounts counts{0, 0};
  // first type: variables whose occurrence positions all imply one value
  for (int var = 1; var <= f.variable_count; ++var) {
    bool consistent = true, seen = false, implied = false;
    for (int k = 0; k < m; ++k) {
      for (int j = 0; j < 3; ++j) {
        int lit = f.clauses[k][j];
        if (std::abs(lit) != var) continue;
        bool value = (s[3 * k + j] == "T") == (lit > 0);
        if (!seen) {
          seen = true;
          implied = value;
        } else if (value != implied) {
          consistent = false;
        }
      }
    }
    if (consistent) ++counts.first_type;
  }
  // second type: product over clauses of their T positions, zero if any clause
  // is all F
  BigInt product = 1;
  for (int k = 0; k < m; ++k) {
    int t_positions = 0;
    for (int j = 0; j < 3; ++j) {
      if (s[3 * k + j] == "T") ++t_positions;
    }
    product *= t_positions;
  }
  counts.second_type = product;
  return counts;
}

bool VerificationReport::all_pass() const {
  for (const auto& c : checks) {
    if (!c.pass) return false;
  }
  return true;
}

std::string VerificationReport::to_text() const {
  std::ostringstream out;
  for (const auto& c : checks) {
    out << "check " << c.name << " " << (c.pass ? "pass" : "fail");
    if (!c.pass && !c.detail.empty()) out << " " << c.detail;
    out << "\n";
  }
  out << "max-sentence-probability " << format_rational(max_probability) << "\n";
  out << "threshold " << format_rational(threshold_q) << "\n";
  return out.str();
}

namespace {

std::string join(const Sentence& s) {
  std::string out;
  for (size_t i = 0; i < s.size(); ++i) {
    out += (i ? " " : "") + s[i];
  }
  return out;
}

// Copy of the forest keeping only root and-nodes selected by `keep`.
DerivationForest restrict_root(const DerivationForest& f,
                               const std::function<bool(const std::string&)>& keep) {
  DerivationForest out = f;
  if (out.empty()) return out;
  auto& root_ands = out.or_nodes[out.root].and_nodes;
  std::vector<int> kept;
  for (int a : root_ands) {
    if (keep(out.and_nodes[a].tree_id)) kept.push_back(a);
  }
  root_ands = std::move(kept);
  if (out.or_nodes[out.root].and_nodes.empty()) out.root = -1;
  return out;
}

}  // namespace

VerificationReport verify_answer_preservation(const Cnf3Formula& f) {
  validate_formula(f);
  if (f.variable_count > 4 || f.clause_count() > 4) {
    throw TooLarge("verification is desk scale: n <= 4 and m <= 4");
  }
  VerificationReport report;
  auto add = [&](const std::string& name, bool pass, const std::string& detail) {
    report.checks.push_back({name, pass, detail});
  };

  SatResult sat = brute_force_sat(f);
  ReductionOutput red = build_mppwg_reduction(f);
  report.threshold_q = red.threshold_q;

  bool mppwg = decide_mppwg(red.grammar, red.word_graph, red.threshold_q);
  add("mppwg-decision", mppwg == sat.satisfiable,
      std::string("mppwg answered ") + (mppwg ? "yes" : "no"));
  bool mps = decide_mps(red.grammar, red.word_graph, red.threshold_q);
  add("mps-decision", mps == sat.satisfiable,
      std::string("mps answered ") + (mps ? "yes" : "no"));

  MppReduction mpp_red = build_mpp_reduction(f);
  bool mpp = decide_mpp(mpp_red.grammar, mpp_red.sentence, mpp_red.threshold_q);
  add("mpp-decision", mpp == sat.satisfiable,
      std::string("mpp answered ") + (mpp ? "yes" : "no"));

  Stsg scfg = flatten_to_scfg(red.grammar);
  bool scfg_mps = decide_mps(scfg, red.word_graph, red.threshold_q);
  add("scfg-mps-decision", scfg_mps == sat.satisfiable,
      std::string("scfg mps answered ") + (scfg_mps ? "yes" : "no"));

  // Per-sentence derivation counts and probabilities from the forest, split
  // by the type of the root tree.
  DerivationForest forest = build_forest(red.grammar, red.word_graph);
  auto first_forest =
      restrict_root(forest, [](const std::string& id) { return id != "b0"; });
  auto second_forest =
      restrict_root(forest, [](const std::string& id) { return id == "b0"; });
  std::map<Sentence, DerivationCounts> counted;
  std::map<Sentence, Rational> probability;
  for (const auto& ym : yield_masses(red.grammar, first_forest)) {
    counted[ym.yield].first_type = ym.derivation_count;
    probability[ym.yield] += ym.probability;
  }
  for (const auto& ym : yield_masses(red.grammar, second_forest)) {
    counted[ym.yield].second_type = ym.derivation_count;
    probability[ym.yield] += ym.probability;
  }

  std::set<Sentence> winning;  // sentences of satisfying (consistent) assignments
  for (const auto& a : sat.assignments) {
    winning.insert(assignment_to_sentence(f, a));
  }

  bool counts_ok = true;
  bool threshold_ok = true;
  std::string counts_detail, threshold_detail;
  report.max_probability = 0;
  SentenceEnumerator sentences(red.word_graph);
  Sentence s;
  while (sentences.next(s)) {
    DerivationCounts expected = expected_derivation_counts(f, s);
    DerivationCounts actual;
    if (auto it = counted.find(s); it != counted.end()) actual = it->second;
    if (counts_ok && !(actual == expected)) {
      counts_ok = false;
      counts_detail = "sentence '" + join(s) + "' has " + actual.first_type.str() + "+" +
                      actual.second_type.str() + " derivations, expected " +
                      expected.first_type.str() + "+" + expected.second_type.str();
    }
    Rational p = 0;
    if (auto it = probability.find(s); it != probability.end()) p = it->second;
    if (p > report.max_probability) report.max_probability = p;
    bool should_win = winning.count(s) > 0;
    if (threshold_ok && (p >= red.threshold_q) != should_win) {
      threshold_ok = false;
      threshold_detail = "sentence '" + join(s) + "' has probability " + format_rational(p) +
                         (should_win ? " below" : " at or above") + " threshold " +
                         format_rational(red.threshold_q);
    }
  }
  add("derivation-counts", counts_ok, counts_detail);
  add("threshold-separation", threshold_ok, threshold_detail);
  return report;
}

Cnf3Formula random_formula(std::mt19937_64& rng, int max_variables, int max_clauses) {
  std::uniform_int_distribution<int> pick_n(1, max_variables);
  for (;;) {
    Cnf3Formula f;
    f.variable_count = pick_n(rng);
    int min_m = std::max(1, (f.variable_count + 2) / 3);
    if (min_m > max_clauses) continue;
    std::uniform_int_distribution<int> pick_m(min_m, max_clauses);
    int m = pick_m(rng);
    std::uniform_int_distribution<int> pick_var(1, f.variable_count);
    std::uniform_int_distribution<int> coin(0, 1);
    std::set<std::array<int, 3>> distinct;
    bool ok = true;
    for (int k = 0; k < m && ok; ++k) {
      std::array<int, 3> clause;
      int attempts = 0;
      do {
        for (int j = 0; j < 3; ++j) {
          int var = pick_var(rng);
          clause[j] = coin(rng) ? var : -var;
        }
        if (++attempts > 64) {
          ok = false;
          break;
        }
      } while (distinct.count(clause) > 0);
      if (ok) {
        distinct.insert(clause);
        f.clauses.push_back(clause);
      }
    }
    if (!ok) continue;
    std::vector<bool> occurs(f.variable_count + 1, false);
    for (const auto& clause : f.clauses) {
      for (int lit : clause) occurs[std::abs(lit)] = true;
    }
    bool covered = true;
    for (int i = 1; i <= f.variable_count; ++i) {
      if (!occurs[i]) covered = false;
    }
    if (!covered) continue;
    return f;
  }
}

}  // namespace stsg
