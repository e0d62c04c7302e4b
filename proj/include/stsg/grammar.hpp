#pragma once

#include <set>
#include <string>
#include <vector>

#include "stsg/rational.hpp"

namespace stsg {

// Ordered tree of symbol names. A leaf whose symbol is a nonterminal is an
// open substitution site.
struct TreeNode {
  std::string symbol;
  std::vector<TreeNode> children;

  bool is_leaf() const { return children.empty(); }
  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

struct ElementaryTree {
  std::string id;
  Rational probability;
  TreeNode structure;

  const std::string& root() const { return structure.symbol; }
};

// Tree ids in left-most substitution order.
struct Derivation {
  std::vector<std::string> tree_ids;
  friend bool operator==(const Derivation&, const Derivation&) = default;
};

using Sentence = std::vector<std::string>;

struct Stsg {
  std::string start;
  std::set<std::string> nonterminals;
  std::set<std::string> terminals;
  std::vector<ElementaryTree> trees;

  bool is_nonterminal(const std::string& s) const { return nonterminals.count(s) > 0; }
  bool is_terminal(const std::string& s) const { return terminals.count(s) > 0; }
  const ElementaryTree* find_tree(const std::string& id) const;
  std::vector<const ElementaryTree*> trees_rooted_at(const std::string& nt) const;
};

// One message per violated invariant; empty iff the grammar is valid.
std::vector<std::string> validate_grammar(const Stsg& g);

// Frontier nodes left to right.
std::vector<const TreeNode*> frontier(const TreeNode& t);

// Left-most nonterminal leaf, or nullptr if the frontier is all terminal.
const TreeNode* leftmost_open(const Stsg& g, const TreeNode& t);

// Grafts t1 at the left-most open node of t. Throws NoOpenTree / RootMismatch.
TreeNode leftmost_substitute(const Stsg& g, const TreeNode& t, const ElementaryTree& t1);

// Folds leftmost_substitute over the derivation; the result must be complete.
TreeNode derive(const Stsg& g, const Derivation& d);

Rational derivation_probability(const Stsg& g, const Derivation& d);

// Terminal frontier, left to right.
Sentence yield_of(const Stsg& g, const TreeNode& tree);

// ---------------------------------------------------------------------------
// Text format: "(S (u1 T) nu2)"; a bare token is a leaf.

std::string format_tree(const TreeNode& t);
TreeNode parse_tree_text(const std::string& text);

// Line-oriented grammar files: "start S", "nonterminal ...", "terminal ...",
// "tree <id> <num>/<den> <tree>".
std::string format_grammar(const Stsg& g);
Stsg parse_grammar_text(const std::string& text);

}  // namespace stsg
