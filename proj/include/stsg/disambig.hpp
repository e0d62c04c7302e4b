#pragma once

#include <cstdint>
#include <map>
#include <optional>

#include "stsg/forest.hpp"

namespace stsg {

constexpr std::int64_t kDefaultCap = 1000000;

struct MpdResult {
  Derivation derivation;
  Rational probability;
};

// Max-product DP on the forest; ties broken by lowest lexicographic tree-id
// sequence. nullopt when the forest is empty.
std::optional<MpdResult> mpd(const Stsg& g, const WordGraph& wg);

// Inside sum over the sentence's forest; 0 when not generated.
Rational sentence_probability(const Stsg& g, const Sentence& s);

// DP over the parse tree: at each node, sum over elementary trees matching
// there of PT(t) times the values at t's open-tree positions.
Rational parse_probability(const Stsg& g, const TreeNode& parse);

struct MppResult {
  TreeNode parse;
  Rational probability;
};
std::optional<MppResult> mpp_exact(const Stsg& g, const WordGraph& wg,
                                   const BigInt& cap = BigInt(kDefaultCap));

struct MpsResult {
  Sentence sentence;
  Rational probability;
};
std::optional<MpsResult> mps_exact(const Stsg& g, const WordGraph& wg,
                                   const BigInt& cap = BigInt(kDefaultCap));

// Decision problems: yes iff the exact maximum is >= q.
bool decide_mppwg(const Stsg& g, const WordGraph& wg, const Rational& q,
                  const BigInt& cap = BigInt(kDefaultCap));
bool decide_mps(const Stsg& g, const WordGraph& wg, const Rational& q,
                const BigInt& cap = BigInt(kDefaultCap));
bool decide_mpp(const Stsg& g, const Sentence& s, const Rational& q,
                const BigInt& cap = BigInt(kDefaultCap));

// Draws complete derivations from the forest, each with probability
// proportional to its derivation probability. Keys are tree-id sequences.
std::map<std::vector<std::string>, std::int64_t> sample_derivations(const Stsg& g,
                                                                    const DerivationForest& f,
                                                                    std::int64_t samples,
                                                                    std::uint64_t seed);

struct MonteCarloResult {
  TreeNode parse;
  double frequency;
  std::int64_t samples;
  std::uint64_t seed;
};
MonteCarloResult monte_carlo_mpp(const Stsg& g, const WordGraph& wg, std::int64_t samples,
                                 std::uint64_t seed);

// Reweights every elementary tree by the total probability of the partial
// derivations that compose exactly to it, then renormalizes per root.
Stsg collapse_transform(const Stsg& g);

// MPD over the collapsed grammar; a heuristic stand-in for MPP.
std::optional<MppResult> mpd_as_mpp_proxy(const Stsg& g, const WordGraph& wg);

}  // namespace stsg
