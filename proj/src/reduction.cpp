#include "stsg/reduction.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "stsg/errors.hpp"

namespace stsg {

std::string literal_name(int literal) {
  return (literal > 0 ? "u" : "nu") + std::to_string(std::abs(literal));
}

std::string clause_name(int clause_index) { return "C" + std::to_string(clause_index); }

std::string position_terminal(int k, int j) {
  return "v" + std::to_string(k) + "_" + std::to_string(j);
}

void validate_formula(const Cnf3Formula& f) {
  if (f.variable_count < 1) throw InvalidFormula("formula needs at least one variable");
  if (f.clauses.empty()) throw InvalidFormula("formula needs at least one clause");
  std::vector<bool> occurs(f.variable_count + 1, false);
  std::set<std::array<int, 3>> distinct;
  for (size_t k = 0; k < f.clauses.size(); ++k) {
    const auto& clause = f.clauses[k];
    for (int lit : clause) {
      int var = std::abs(lit);
      if (lit == 0 || var > f.variable_count) {
        throw InvalidFormula("clause " + std::to_string(k + 1) + ": literal " +
                             std::to_string(lit) + " out of range");
      }
      occurs[var] = true;
    }
    if (!distinct.insert(clause).second) {
      throw InvalidFormula("clause " + std::to_string(k + 1) + " repeats an earlier clause");
    }
  }
  for (int i = 1; i <= f.variable_count; ++i) {
    if (!occurs[i]) {
      throw InvalidFormula("variable u" + std::to_string(i) + " never occurs");
    }
  }
}

Cnf3Formula parse_dimacs(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int line_number = 0;
  Cnf3Formula f;
  int declared_clauses = -1;
  std::vector<int> pending;
  while (std::getline(in, line)) {
    ++line_number;
    std::istringstream ls(line);
    std::string first;
    if (!(ls >> first) || first == "c") continue;
    if (first == "p") {
      std::string kind;
      if (!(ls >> kind >> f.variable_count >> declared_clauses) || kind != "cnf") {
        throw TextParseError("expected 'p cnf <vars> <clauses>'", line_number);
      }
      continue;
    }
    if (declared_clauses < 0) {
      throw TextParseError("clause before 'p cnf' header", line_number);
    }
    ls.clear();
    ls.str(line);
    int lit;
    while (ls >> lit) {
      if (lit == 0) {
        if (pending.size() != 3) {
          throw InvalidFormula("clause " + std::to_string(f.clauses.size() + 1) + " has " +
                               std::to_string(pending.size()) + " literals, not 3");
        }
        f.clauses.push_back({pending[0], pending[1], pending[2]});
        pending.clear();
      } else {
        pending.push_back(lit);
      }
    }
    if (ls.fail() && !ls.eof()) {
      throw TextParseError("non-integer token in clause", line_number);
    }
  }
  if (!pending.empty()) throw InvalidFormula("unterminated clause at end of input");
  if (declared_clauses < 0) throw InvalidFormula("missing 'p cnf' header");
  if (f.clause_count() != declared_clauses) {
    throw InvalidFormula("header declares " + std::to_string(declared_clauses) +
                         " clauses, found " + std::to_string(f.clause_count()));
  }
  validate_formula(f);
  return f;
}

std::string format_dimacs(const Cnf3Formula& f) {
  std::ostringstream out;
  out << "p cnf " << f.variable_count << " " << f.clause_count() << "\n";
  for (const auto& clause : f.clauses) {
    out << clause[0] << " " << clause[1] << " " << clause[2] << " 0\n";
  }
  return out.str();
}

std::vector<int> occurrence_counts(const Cnf3Formula& f) {
  std::vector<int> counts(f.variable_count, 0);
  for (const auto& clause : f.clauses) {
    for (int lit : clause) {
      ++counts[std::abs(lit) - 1];
    }
  }
  return counts;
}

namespace {

// Bounds of the open theta interval for a given per-occurrence weight w
// (w = 1/2 for the word-graph gadget, 1/(6m) for the single-sentence one):
// lower = 1 / (2 sum_i w^{n_i} + w^m), upper = 1 / (2 sum_i w^{n_i}).
ThetaBounds theta_bounds_for_weight(const Cnf3Formula& f, const Rational& w) {
  const auto counts = occurrence_counts(f);
  const unsigned m = static_cast<unsigned>(f.clause_count());
  Rational sum = 0;
  for (int n_i : counts) {
    sum += rational_pow(w, static_cast<unsigned>(n_i));
  }
  return ThetaBounds{Rational(1) / (2 * sum + rational_pow(w, m)), Rational(1) / (2 * sum)};
}

struct GadgetPieces {
  Rational theta;
  std::vector<Rational> p_i;  // per variable
  Rational p_zero;
  Rational threshold_q;
  Rational first_type;
  Rational second_type;
};

GadgetPieces gadget_pieces(const Cnf3Formula& f, const Rational& w) {
  const auto counts = occurrence_counts(f);
  const unsigned m = static_cast<unsigned>(f.clause_count());
  const int n = f.variable_count;
  GadgetPieces out;
  out.theta = choose_theta(theta_bounds_for_weight(f, w));
  Rational sum_p = 0;
  for (int n_i : counts) {
    out.p_i.push_back(out.theta * rational_pow(w, static_cast<unsigned>(n_i)));
    sum_p += out.p_i.back();
  }
  out.p_zero = 1 - 2 * sum_p;
  out.first_type = out.theta * rational_pow(w, 3 * m);
  out.second_type =
      out.p_zero * rational_pow(w, 2 * m) * rational_pow(Rational(1, 3), m);
  out.threshold_q = n * out.first_type + out.second_type;
  return out;
}

// Literal node of clause k, disjunct j; lexicalized literals get a terminal
// child, in the MPP variant wrapped once more with the position terminal.
TreeNode literal_node(int literal, const std::string& value, bool position_wrapped, int k,
                      int j) {
  TreeNode node{literal_name(literal), {}};
  if (!value.empty()) {
    TreeNode child{value, {}};
    if (position_wrapped) {
      child.children.push_back(TreeNode{position_terminal(k, j), {}});
    }
    node.children.push_back(std::move(child));
  }
  return node;
}

// Root-S tree assigning `value` to every occurrence of variable `var`;
// var == 0 builds the fully open backbone.
TreeNode assignment_structure(const Cnf3Formula& f, int var, bool value,
                              bool position_wrapped) {
  TreeNode root{"S", {}};
  for (int k = 0; k < f.clause_count(); ++k) {
    TreeNode clause{clause_name(k + 1), {}};
    if (var != 0) {
      for (int j = 0; j < 3; ++j) {
        int lit = f.clauses[k][j];
        std::string terminal;
        if (std::abs(lit) == var) {
          bool literal_true = (lit > 0) == value;
          terminal = literal_true ? "T" : "F";
        }
        clause.children.push_back(literal_node(lit, terminal, position_wrapped, k + 1, j + 1));
      }
      root.children.push_back(std::move(clause));
    } else {
      root.children.push_back(TreeNode{clause_name(k + 1), {}});
    }
  }
  return root;
}

TreeNode clause_structure(const Cnf3Formula& f, int k, int lexicalized_j,
                          bool position_wrapped) {
  TreeNode clause{clause_name(k + 1), {}};
  for (int j = 0; j < 3; ++j) {
    std::string terminal = (j == lexicalized_j) ? "T" : "";
    clause.children.push_back(
        literal_node(f.clauses[k][j], terminal, position_wrapped, k + 1, j + 1));
  }
  return clause;
}

std::set<std::string> gadget_nonterminals(const Cnf3Formula& f) {
  std::set<std::string> nts = {"S"};
  for (int k = 1; k <= f.clause_count(); ++k) nts.insert(clause_name(k));
  for (int i = 1; i <= f.variable_count; ++i) {
    nts.insert(literal_name(i));
    nts.insert(literal_name(-i));
  }
  return nts;
}

}  // namespace

ThetaBounds theta_bounds(const Cnf3Formula& f) {
  validate_formula(f);
  return theta_bounds_for_weight(f, Rational(1, 2));
}

Rational choose_theta(const ThetaBounds& bounds) {
  return (bounds.lower + bounds.upper) / 2;
}

ReductionOutput build_mppwg_reduction(const Cnf3Formula& f) {
  validate_formula(f);
  const int n = f.variable_count;
  const int m = f.clause_count();
  GadgetPieces pieces = gadget_pieces(f, Rational(1, 2));

  ReductionOutput out;
  out.theta = pieces.theta;
  out.threshold_q = pieces.threshold_q;
  out.p_zero = pieces.p_zero;
  out.occurrence_counts = occurrence_counts(f);
  out.first_type_probability = pieces.first_type;
  out.second_type_probability = pieces.second_type;

  Stsg& g = out.grammar;
  g.start = "S";
  g.terminals = {"T", "F"};
  g.nonterminals = gadget_nonterminals(f);

  for (int i = 1; i <= n; ++i) {
    g.trees.push_back({"a" + std::to_string(i) + "_t", pieces.p_i[i - 1],
                       assignment_structure(f, i, true, false)});
    g.trees.push_back({"a" + std::to_string(i) + "_f", pieces.p_i[i - 1],
                       assignment_structure(f, i, false, false)});
  }
  g.trees.push_back({"b0", pieces.p_zero, assignment_structure(f, 0, false, false)});
  for (int k = 0; k < m; ++k) {
    for (int j = 0; j < 3; ++j) {
      g.trees.push_back({"c" + std::to_string(k + 1) + "_" + std::to_string(j + 1),
                         Rational(1, 3), clause_structure(f, k, j, false)});
    }
  }
  for (int i = 1; i <= n; ++i) {
    for (int lit : {i, -i}) {
      for (const char* value : {"T", "F"}) {
        g.trees.push_back({literal_name(lit) + "_" + value, Rational(1, 2),
                           TreeNode{literal_name(lit), {TreeNode{value, {}}}}});
      }
    }
  }

  out.word_graph.positions.assign(3 * static_cast<size_t>(m), {"T", "F"});
  return out;
}

DerivationType classify_derivation(const ReductionOutput& out, const Derivation& d) {
  if (d.tree_ids.empty()) throw UnknownTree("empty derivation");
  const std::string& first = d.tree_ids.front();
  if (first == "b0") return DerivationType::SecondType;
  const ElementaryTree* t = out.grammar.find_tree(first);
  if (t == nullptr) throw UnknownTree("unknown tree id '" + first + "'");
  if (t->root() != "S") {
    throw RootMismatch("derivation does not start from an S-rooted tree");
  }
  return DerivationType::FirstType;
}

MppReduction build_mpp_reduction(const Cnf3Formula& f) {
  validate_formula(f);
  const int n = f.variable_count;
  const int m = f.clause_count();
  const Rational w(1, 6 * m);
  GadgetPieces pieces = gadget_pieces(f, w);

  MppReduction out;
  out.theta = pieces.theta;
  out.threshold_q = pieces.threshold_q;
  out.p_zero = pieces.p_zero;

  Stsg& g = out.grammar;
  g.start = "S";
  g.nonterminals = gadget_nonterminals(f);
  g.nonterminals.insert("T");
  g.nonterminals.insert("F");
  for (int k = 1; k <= m; ++k) {
    for (int j = 1; j <= 3; ++j) {
      g.terminals.insert(position_terminal(k, j));
      out.sentence.push_back(position_terminal(k, j));
    }
  }

  for (int i = 1; i <= n; ++i) {
    g.trees.push_back({"a" + std::to_string(i) + "_t", pieces.p_i[i - 1],
                       assignment_structure(f, i, true, true)});
    g.trees.push_back({"a" + std::to_string(i) + "_f", pieces.p_i[i - 1],
                       assignment_structure(f, i, false, true)});
  }
  g.trees.push_back({"b0", pieces.p_zero, assignment_structure(f, 0, false, true)});
  for (int k = 0; k < m; ++k) {
    for (int j = 0; j < 3; ++j) {
      g.trees.push_back({"c" + std::to_string(k + 1) + "_" + std::to_string(j + 1),
                         Rational(1, 3), clause_structure(f, k, j, true)});
    }
  }
  for (int i = 1; i <= n; ++i) {
    for (int lit : {i, -i}) {
      for (const char* value : {"T", "F"}) {
        for (int k = 1; k <= m; ++k) {
          for (int j = 1; j <= 3; ++j) {
            TreeNode structure{literal_name(lit),
                               {TreeNode{value, {TreeNode{position_terminal(k, j), {}}}}}};
            g.trees.push_back({literal_name(lit) + "_" + value + "_" + position_terminal(k, j),
                               w, std::move(structure)});
          }
        }
      }
    }
  }
  return out;
}

Stsg flatten_to_scfg(const Stsg& g) {
  Stsg out;
  out.start = g.start;
  out.terminals = g.terminals;
  out.nonterminals = g.nonterminals;
  std::set<std::string> productions;
  for (const auto& t : g.trees) {
    TreeNode flat{t.root(), {}};
    std::string key = t.root() + " ->";
    for (const TreeNode* leaf : frontier(t.structure)) {
      flat.children.push_back(TreeNode{leaf->symbol, {}});
      key += " " + leaf->symbol;
    }
    if (!productions.insert(key).second) {
      throw DuplicateProduction("trees flatten to the same production: " + key);
    }
    out.trees.push_back({t.id, t.probability, std::move(flat)});
  }
  return out;
}

}  // namespace stsg
