#pragma once

#include <utility>
#include <vector>

#include "stsg/grammar.hpp"
#include "stsg/wordgraph.hpp"

namespace stsg {

// Shared derivation forest over a sausage word-graph. Or-nodes are
// (nonterminal, span); and-nodes are one elementary tree whose frontier
// terminals match the span and whose open trees align with the child
// or-nodes left to right.
struct DerivationForest {
  struct AndNode {
    std::string tree_id;
    std::vector<int> children;  // or-node indices, left to right
  };
  struct OrNode {
    std::string symbol;
    int begin;
    int end;
    std::vector<int> and_nodes;
  };

  std::vector<OrNode> or_nodes;
  std::vector<AndNode> and_nodes;
  int root = -1;  // (start, full span); -1 when the word-graph has no derivation

  bool empty() const { return root < 0; }
};

DerivationForest build_forest(const Stsg& g, const WordGraph& wg);

BigInt count_derivations(const DerivationForest& f);

// All complete derivations with exact probabilities, left-most order.
// Throws CapExceeded (with the DP count) when more than cap exist.
std::vector<std::pair<Derivation, Rational>> enumerate_derivations(
    const Stsg& g, const DerivationForest& f, const BigInt& cap = BigInt(1000000));

// Derivations grouped by derived parse (structural equality), sorted by the
// parse's canonical text.
std::vector<std::pair<TreeNode, std::vector<Derivation>>> enumerate_parses(
    const Stsg& g, const DerivationForest& f, const BigInt& cap = BigInt(1000000));

// Total probability mass of all complete derivations in the forest.
Rational inside_mass(const Stsg& g, const DerivationForest& f);

// Summed derivation probability per distinct parse, computed on the forest
// without materializing individual derivations.
struct ParseMass {
  TreeNode parse;
  Rational probability;
  BigInt derivation_count;
};
std::vector<ParseMass> parse_masses(const Stsg& g, const DerivationForest& f,
                                    const BigInt& cap = BigInt(1000000));

// Summed derivation probability per distinct yield.
struct YieldMass {
  Sentence yield;
  Rational probability;
  BigInt derivation_count;
};
std::vector<YieldMass> yield_masses(const Stsg& g, const DerivationForest& f,
                                    const BigInt& cap = BigInt(1000000));

}  // namespace stsg
