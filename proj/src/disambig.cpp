#include "stsg/disambig.hpp"

#include <algorithm>
#include <random>
#include <unordered_map>

#include "stsg/errors.hpp"

namespace stsg {

namespace {

// Matches an elementary tree against the top of a fragment. On success,
// `targets` holds the fragment nodes aligned with the tree's open leaves,
// left to right.
bool match_fragment(const Stsg& g, const TreeNode& t, const TreeNode& frag,
                    std::vector<const TreeNode*>& targets) {
  if (t.symbol != frag.symbol) return false;
  if (t.is_leaf()) {
    if (g.is_nonterminal(t.symbol)) {
      targets.push_back(&frag);
      return true;
    }
    return frag.is_leaf();
  }
  if (frag.is_leaf() || frag.children.size() != t.children.size()) return false;
  for (size_t i = 0; i < t.children.size(); ++i) {
    if (!match_fragment(g, t.children[i], frag.children[i], targets)) return false;
  }
  return true;
}

}  // namespace

std::optional<MpdResult> mpd(const Stsg& g, const WordGraph& wg) {
  DerivationForest f = build_forest(g, wg);
  if (f.empty()) return std::nullopt;
  std::unordered_map<std::string, const ElementaryTree*> trees;
  for (const auto& t : g.trees) trees.emplace(t.id, &t);

  using Best = std::pair<Rational, std::vector<std::string>>;
  std::vector<std::optional<Best>> memo(f.or_nodes.size());
  auto best = [&](auto&& self, int node) -> const Best& {
    if (!memo[node]) {
      std::optional<Best> winner;
      for (int a : f.or_nodes[node].and_nodes) {
        const auto& an = f.and_nodes[a];
        Rational prob = trees.at(an.tree_id)->probability;
        std::vector<std::string> seq = {an.tree_id};
        for (int c : an.children) {
          const Best& sub = self(self, c);
          prob *= sub.first;
          seq.insert(seq.end(), sub.second.begin(), sub.second.end());
        }
        if (!winner || prob > winner->first ||
            (prob == winner->first && seq < winner->second)) {
          winner = Best{std::move(prob), std::move(seq)};
        }
      }
      memo[node] = std::move(*winner);
    }
    return *memo[node];
  };
  const Best& top = best(best, f.root);
  return MpdResult{Derivation{top.second}, top.first};
}

Rational sentence_probability(const Stsg& g, const Sentence& s) {
  DerivationForest f = build_forest(g, WordGraph::from_sentence(s));
  if (f.empty()) return 0;
  return inside_mass(g, f);
}

Rational parse_probability(const Stsg& g, const TreeNode& parse) {
  std::unordered_map<const TreeNode*, Rational> memo;
  auto value = [&](auto&& self, const TreeNode& node) -> Rational {
    if (node.is_leaf()) return 0;  // an unexpanded nonterminal is underivable
    auto it = memo.find(&node);
    if (it != memo.end()) return it->second;
    Rational total = 0;
    for (const ElementaryTree* t : g.trees_rooted_at(node.symbol)) {
      std::vector<const TreeNode*> targets;
      if (!match_fragment(g, t->structure, node, targets)) continue;
      Rational w = t->probability;
      for (const TreeNode* target : targets) {
        w *= self(self, *target);
        if (w == 0) break;
      }
      total += w;
    }
    memo.emplace(&node, total);
    return total;
  };
  if (!g.is_nonterminal(parse.symbol)) return 0;
  return value(value, parse);
}

namespace {

// probability desc, then yield asc, then canonical tree text asc
bool better_parse(const Rational& prob, const Sentence& y, const std::string& text,
                  const Rational& best_prob, const Sentence& best_y,
                  const std::string& best_text) {
  if (prob != best_prob) return prob > best_prob;
  if (y != best_y) return y < best_y;
  return text < best_text;
}

}  // namespace

std::optional<MppResult> mpp_exact(const Stsg& g, const WordGraph& wg, const BigInt& cap) {
  DerivationForest f = build_forest(g, wg);
  if (f.empty()) return std::nullopt;
  auto masses = parse_masses(g, f, cap);
  const ParseMass* winner = nullptr;
  Sentence winner_yield;
  std::string winner_text;
  for (const auto& m : masses) {
    Sentence y = yield_of(g, m.parse);
    std::string text = format_tree(m.parse);
    if (winner == nullptr ||
        better_parse(m.probability, y, text, winner->probability, winner_yield, winner_text)) {
      winner = &m;
      winner_yield = std::move(y);
      winner_text = std::move(text);
    }
  }
  if (winner == nullptr) return std::nullopt;
  return MppResult{winner->parse, winner->probability};
}

std::optional<MpsResult> mps_exact(const Stsg& g, const WordGraph& wg, const BigInt& cap) {
  BigInt count = sentence_count(wg);
  if (count > cap) {
    throw CapExceeded(count, "word-graph has " + count.str() + " sentences, cap " + cap.str());
  }
  DerivationForest f = build_forest(g, wg);
  if (f.empty()) return std::nullopt;
  auto masses = yield_masses(g, f, cap);
  const YieldMass* winner = nullptr;
  for (const auto& m : masses) {
    // yield_masses is sorted by yield, so on ties the first (lexicographically
    // lowest) sentence wins.
    if (winner == nullptr || m.probability > winner->probability) winner = &m;
  }
  if (winner == nullptr) return std::nullopt;
  return MpsResult{winner->yield, winner->probability};
}

bool decide_mppwg(const Stsg& g, const WordGraph& wg, const Rational& q, const BigInt& cap) {
  auto result = mpp_exact(g, wg, cap);
  return result && result->probability >= q;
}

bool decide_mps(const Stsg& g, const WordGraph& wg, const Rational& q, const BigInt& cap) {
  auto result = mps_exact(g, wg, cap);
  return result && result->probability >= q;
}

bool decide_mpp(const Stsg& g, const Sentence& s, const Rational& q, const BigInt& cap) {
  auto result = mpp_exact(g, WordGraph::from_sentence(s), cap);
  return result && result->probability >= q;
}

std::map<std::vector<std::string>, std::int64_t> sample_derivations(const Stsg& g,
                                                                    const DerivationForest& f,
                                                                    std::int64_t samples,
                                                                    std::uint64_t seed) {
  if (f.empty()) throw EmptyForest("cannot sample from an empty forest");
  std::unordered_map<std::string, const ElementaryTree*> trees;
  for (const auto& t : g.trees) trees.emplace(t.id, &t);

  // inside values per or-node, then per-and sampling weights as doubles
  std::vector<std::optional<Rational>> inside(f.or_nodes.size());
  auto inside_of = [&](auto&& self, int node) -> const Rational& {
    if (!inside[node]) {
      Rational total = 0;
      for (int a : f.or_nodes[node].and_nodes) {
        const auto& an = f.and_nodes[a];
        Rational product = trees.at(an.tree_id)->probability;
        for (int c : an.children) product *= self(self, c);
        total += product;
      }
      inside[node] = total;
    }
    return *inside[node];
  };
  std::vector<std::vector<double>> weights(f.or_nodes.size());
  auto weights_of = [&](int node) -> const std::vector<double>& {
    if (weights[node].empty()) {
      for (int a : f.or_nodes[node].and_nodes) {
        const auto& an = f.and_nodes[a];
        Rational product = trees.at(an.tree_id)->probability;
        for (int c : an.children) product *= inside_of(inside_of, c);
        weights[node].push_back(rational_to_double(product));
      }
    }
    return weights[node];
  };

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  std::map<std::vector<std::string>, std::int64_t> counts;
  std::vector<std::string> ids;
  auto descend = [&](auto&& self, int node) -> void {
    const auto& w = weights_of(node);
    double total = 0;
    for (double x : w) total += x;
    double draw = uniform(rng) * total;
    size_t choice = 0;
    for (; choice + 1 < w.size(); ++choice) {
      if (draw < w[choice]) break;
      draw -= w[choice];
    }
    const auto& an = f.and_nodes[f.or_nodes[node].and_nodes[choice]];
    ids.push_back(an.tree_id);
    for (int c : an.children) self(self, c);
  };
  for (std::int64_t i = 0; i < samples; ++i) {
    ids.clear();
    descend(descend, f.root);
    ++counts[ids];
  }
  return counts;
}

MonteCarloResult monte_carlo_mpp(const Stsg& g, const WordGraph& wg, std::int64_t samples,
                                 std::uint64_t seed) {
  DerivationForest f = build_forest(g, wg);
  auto derivation_counts = sample_derivations(g, f, samples, seed);

  struct Group {
    TreeNode parse;
    std::int64_t count = 0;
  };
  std::map<std::string, Group> by_parse;
  for (const auto& [ids, n] : derivation_counts) {
    TreeNode parse = derive(g, Derivation{ids});
    std::string key = format_tree(parse);
    auto it = by_parse.find(key);
    if (it == by_parse.end()) {
      by_parse.emplace(std::move(key), Group{std::move(parse), n});
    } else {
      it->second.count += n;
    }
  }
  const Group* modal = nullptr;
  Sentence modal_yield;
  for (const auto& [key, group] : by_parse) {
    Sentence y = yield_of(g, group.parse);
    if (modal == nullptr || group.count > modal->count ||
        (group.count == modal->count && y < modal_yield)) {
      modal = &group;
      modal_yield = std::move(y);
    }
  }
  return MonteCarloResult{modal->parse,
                          static_cast<double>(modal->count) / static_cast<double>(samples),
                          samples, seed};
}

namespace {

// Total probability of all partial derivations composing exactly to `frag`.
Rational fragment_weight(const Stsg& g, const TreeNode& frag) {
  Rational total = 0;
  for (const ElementaryTree* t : g.trees_rooted_at(frag.symbol)) {
    std::vector<const TreeNode*> targets;
    if (!match_fragment(g, t->structure, frag, targets)) continue;
    Rational w = t->probability;
    for (const TreeNode* target : targets) {
      // An open leaf of the fragment stays open: the partial derivation ends.
      if (!target->is_leaf()) w *= fragment_weight(g, *target);
    }
    total += w;
  }
  return total;
}

}  // namespace

Stsg collapse_transform(const Stsg& g) {
  Stsg out = g;
  std::map<std::string, Rational> root_sums;
  std::vector<Rational> weights;
  weights.reserve(g.trees.size());
  for (const auto& t : g.trees) {
    Rational w = fragment_weight(g, t.structure);
    root_sums[t.root()] += w;
    weights.push_back(std::move(w));
  }
  for (size_t i = 0; i < out.trees.size(); ++i) {
    out.trees[i].probability = weights[i] / root_sums[out.trees[i].root()];
  }
  return out;
}

std::optional<MppResult> mpd_as_mpp_proxy(const Stsg& g, const WordGraph& wg) {
  Stsg collapsed = collapse_transform(g);
  auto result = mpd(collapsed, wg);
  if (!result) return std::nullopt;
  return MppResult{derive(collapsed, result->derivation), result->probability};
}

}  // namespace stsg
