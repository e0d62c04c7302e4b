#include "stsg/forest.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <tuple>
#include <unordered_map>

#include "stsg/errors.hpp"

namespace stsg {

namespace {

struct FrontierItem {
  std::string symbol;
  bool open;  // nonterminal leaf
};

std::vector<FrontierItem> frontier_items(const Stsg& g, const ElementaryTree& t) {
  std::vector<FrontierItem> items;
  for (const TreeNode* leaf : frontier(t.structure)) {
    items.push_back({leaf->symbol, g.is_nonterminal(leaf->symbol)});
  }
  return items;
}

using OrKey = std::tuple<std::string, int, int>;

struct Builder {
  const Stsg& g;
  const WordGraph& wg;
  DerivationForest f;
  std::map<OrKey, int> index;
  std::vector<std::set<std::pair<std::string, std::vector<int>>>> seen;
  std::vector<std::set<std::string>> pos_sets;
  bool changed = false;

  Builder(const Stsg& g_, const WordGraph& wg_) : g(g_), wg(wg_) {
    for (const auto& q : wg.positions) {
      pos_sets.emplace_back(q.begin(), q.end());
    }
  }

  int get_or_node(const std::string& sym, int b, int e) {
    auto it = index.find({sym, b, e});
    if (it != index.end()) return it->second;
    int id = static_cast<int>(f.or_nodes.size());
    f.or_nodes.push_back({sym, b, e, {}});
    seen.emplace_back();
    index.emplace(OrKey{sym, b, e}, id);
    changed = true;
    return id;
  }

  // Enumerates every alignment of the tree's frontier with span [b,e),
  // guided by a backward-reachability table so no partial path dead-ends.
  void match_tree(const ElementaryTree& t, int b, int e) {
    auto items = frontier_items(g, t);
    const int K = static_cast<int>(items.size());
    const int width = e - b;
    // can[k][p-b]: frontier suffix k..K can span positions p..e
    std::vector<std::vector<char>> can(K + 1, std::vector<char>(width + 1, 0));
    can[K][width] = 1;
    for (int k = K - 1; k >= 0; --k) {
      for (int p = b; p <= e; ++p) {
        if (items[k].open) {
          for (int q = p + 1; q <= e; ++q) {
            if (can[k + 1][q - b] && index.count({items[k].symbol, p, q})) {
              can[k][p - b] = 1;
              break;
            }
          }
        } else if (p < e && can[k + 1][p + 1 - b] &&
                   pos_sets[p].count(items[k].symbol) > 0) {
          can[k][p - b] = 1;
        }
      }
    }
    if (!can[0][0]) return;

    std::vector<int> children;
    enumerate_alignments(t, items, can, b, e, 0, b, children);
  }

  void enumerate_alignments(const ElementaryTree& t, const std::vector<FrontierItem>& items,
                            const std::vector<std::vector<char>>& can, int b, int e, int k,
                            int p, std::vector<int>& children) {
    const int K = static_cast<int>(items.size());
    if (k == K) {
      if (p != e) return;
      int or_id = get_or_node(t.root(), b, e);
      if (seen[or_id].insert({t.id, children}).second) {
        int and_id = static_cast<int>(f.and_nodes.size());
        f.and_nodes.push_back({t.id, children});
        f.or_nodes[or_id].and_nodes.push_back(and_id);
        changed = true;
      }
      return;
    }
    if (items[k].open) {
      for (int q = p + 1; q <= e; ++q) {
        if (!can[k + 1][q - b]) continue;
        auto it = index.find({items[k].symbol, p, q});
        if (it == index.end()) continue;
        children.push_back(it->second);
        enumerate_alignments(t, items, can, b, e, k + 1, q, children);
        children.pop_back();
      }
    } else {
      if (p < e && can[k + 1][p + 1 - b] && pos_sets[p].count(items[k].symbol) > 0) {
        enumerate_alignments(t, items, can, b, e, k + 1, p + 1, children);
      }
    }
  }
};

void check_acyclic(const DerivationForest& f) {
  if (f.empty()) return;
  // colors: 0 new, 1 on stack, 2 done
  std::vector<char> color(f.or_nodes.size(), 0);
  std::vector<std::pair<int, size_t>> stack;  // (or, next child cursor over flattened edges)
  std::vector<std::vector<int>> edges(f.or_nodes.size());
  for (size_t i = 0; i < f.or_nodes.size(); ++i) {
    for (int a : f.or_nodes[i].and_nodes) {
      for (int c : f.and_nodes[a].children) edges[i].push_back(c);
    }
  }
  stack.push_back({f.root, 0});
  color[f.root] = 1;
  while (!stack.empty()) {
    auto& [node, cursor] = stack.back();
    if (cursor == edges[node].size()) {
      color[node] = 2;
      stack.pop_back();
      continue;
    }
    int next = edges[node][cursor++];
    if (color[next] == 1) {
      throw CyclicForest("forest contains a unary derivation cycle at nonterminal '" +
                         f.or_nodes[next].symbol + "'");
    }
    if (color[next] == 0) {
      color[next] = 1;
      stack.push_back({next, 0});
    }
  }
}

std::unordered_map<std::string, const ElementaryTree*> tree_index(const Stsg& g) {
  std::unordered_map<std::string, const ElementaryTree*> idx;
  for (const auto& t : g.trees) idx.emplace(t.id, &t);
  return idx;
}

}  // namespace

DerivationForest build_forest(const Stsg& g, const WordGraph& wg) {
  Builder builder(g, wg);
  const int L = static_cast<int>(wg.length());
  for (int len = 1; len <= L; ++len) {
    for (int b = 0; b + len <= L; ++b) {
      // Fixpoint over unary-frontier trees that keep the span.
      do {
        builder.changed = false;
        for (const auto& t : g.trees) {
          builder.match_tree(t, b, b + len);
        }
      } while (builder.changed);
    }
  }
  auto it = builder.index.find({g.start, 0, L});
  builder.f.root = (it == builder.index.end()) ? -1 : it->second;
  check_acyclic(builder.f);
  return builder.f;
}

BigInt count_derivations(const DerivationForest& f) {
  if (f.empty()) return 0;
  std::vector<std::optional<BigInt>> memo(f.or_nodes.size());
  auto count = [&](auto&& self, int node) -> const BigInt& {
    if (!memo[node]) {
      BigInt total = 0;
      for (int a : f.or_nodes[node].and_nodes) {
        BigInt product = 1;
        for (int c : f.and_nodes[a].children) product *= self(self, c);
        total += product;
      }
      memo[node] = total;
    }
    return *memo[node];
  };
  return count(count, f.root);
}

std::vector<std::pair<Derivation, Rational>> enumerate_derivations(const Stsg& g,
                                                                   const DerivationForest& f,
                                                                   const BigInt& cap) {
  if (f.empty()) return {};
  BigInt total = count_derivations(f);
  if (total > cap) {
    throw CapExceeded(total, "forest has " + total.str() + " derivations, cap " + cap.str());
  }
  auto trees = tree_index(g);
  using Item = std::pair<std::vector<std::string>, Rational>;
  std::vector<std::optional<std::vector<Item>>> memo(f.or_nodes.size());
  auto lists = [&](auto&& self, int node) -> const std::vector<Item>& {
    if (!memo[node]) {
      std::vector<Item> out;
      for (int a : f.or_nodes[node].and_nodes) {
        const auto& an = f.and_nodes[a];
        const ElementaryTree* t = trees.at(an.tree_id);
        std::vector<Item> partial = {{{an.tree_id}, t->probability}};
        for (int c : an.children) {
          const auto& sub = self(self, c);
          std::vector<Item> next;
          next.reserve(partial.size() * sub.size());
          for (const auto& [ids, p] : partial) {
            for (const auto& [sub_ids, sub_p] : sub) {
              auto combined = ids;
              combined.insert(combined.end(), sub_ids.begin(), sub_ids.end());
              next.emplace_back(std::move(combined), p * sub_p);
            }
          }
          partial = std::move(next);
        }
        out.insert(out.end(), partial.begin(), partial.end());
      }
      memo[node] = std::move(out);
    }
    return *memo[node];
  };
  std::vector<std::pair<Derivation, Rational>> result;
  for (const auto& [ids, p] : lists(lists, f.root)) {
    result.push_back({Derivation{ids}, p});
  }
  return result;
}

std::vector<std::pair<TreeNode, std::vector<Derivation>>> enumerate_parses(
    const Stsg& g, const DerivationForest& f, const BigInt& cap) {
  std::map<std::string, std::pair<TreeNode, std::vector<Derivation>>> groups;
  for (auto& [d, p] : enumerate_derivations(g, f, cap)) {
    TreeNode parse = derive(g, d);
    std::string key = format_tree(parse);
    auto it = groups.find(key);
    if (it == groups.end()) {
      groups.emplace(std::move(key), std::make_pair(std::move(parse), std::vector<Derivation>{d}));
    } else {
      it->second.second.push_back(d);
    }
  }
  std::vector<std::pair<TreeNode, std::vector<Derivation>>> out;
  for (auto& [key, value] : groups) out.push_back(std::move(value));
  return out;
}

Rational inside_mass(const Stsg& g, const DerivationForest& f) {
  if (f.empty()) return 0;
  auto trees = tree_index(g);
  std::vector<std::optional<Rational>> memo(f.or_nodes.size());
  auto inside = [&](auto&& self, int node) -> const Rational& {
    if (!memo[node]) {
      Rational total = 0;
      for (int a : f.or_nodes[node].and_nodes) {
        const auto& an = f.and_nodes[a];
        Rational product = trees.at(an.tree_id)->probability;
        for (int c : an.children) product *= self(self, c);
        total += product;
      }
      memo[node] = total;
    }
    return *memo[node];
  };
  return inside(inside, f.root);
}

namespace {

// Replaces the open leaves of `node` with `substitutes`, left to right.
void graft(const Stsg& g, TreeNode& node, const std::vector<const TreeNode*>& substitutes,
           size_t& cursor) {
  if (node.is_leaf()) {
    if (g.is_nonterminal(node.symbol)) {
      node = *substitutes[cursor++];
    }
    return;
  }
  for (auto& c : node.children) graft(g, c, substitutes, cursor);
}

template <typename Key, typename Combine>
std::vector<std::tuple<Key, Rational, BigInt>> masses_dp(const Stsg& g,
                                                         const DerivationForest& f,
                                                         const BigInt& cap, Combine combine) {
  BigInt total = count_derivations(f);
  if (total > cap) {
    throw CapExceeded(total, "forest has " + total.str() + " derivations, cap " + cap.str());
  }
  auto trees = tree_index(g);
  using Entry = std::tuple<Key, Rational, BigInt>;
  std::vector<std::optional<std::vector<Entry>>> memo(f.or_nodes.size());
  auto masses = [&](auto&& self, int node) -> const std::vector<Entry>& {
    if (!memo[node]) {
      std::map<Key, std::pair<Rational, BigInt>> acc;
      for (int a : f.or_nodes[node].and_nodes) {
        const auto& an = f.and_nodes[a];
        const ElementaryTree* t = trees.at(an.tree_id);
        std::vector<std::vector<const Entry*>> child_entries;
        for (int c : an.children) {
          const auto& sub = self(self, c);
          std::vector<const Entry*> ptrs;
          for (const auto& e : sub) ptrs.push_back(&e);
          child_entries.push_back(std::move(ptrs));
        }
        std::vector<const Entry*> choice(child_entries.size(), nullptr);
        auto rec = [&](auto&& go, size_t i) -> void {
          if (i == child_entries.size()) {
            Rational p = t->probability;
            BigInt n = 1;
            for (const Entry* e : choice) {
              p *= std::get<1>(*e);
              n *= std::get<2>(*e);
            }
            auto [it, fresh] = acc.emplace(combine(*t, choice), std::make_pair(p, n));
            if (!fresh) {
              it->second.first += p;
              it->second.second += n;
            }
            return;
          }
          for (const Entry* e : child_entries[i]) {
            choice[i] = e;
            go(go, i + 1);
          }
        };
        rec(rec, 0);
      }
      std::vector<Entry> out;
      for (auto& [key, value] : acc) {
        out.emplace_back(key, std::move(value.first), std::move(value.second));
      }
      memo[node] = std::move(out);
    }
    return *memo[node];
  };
  return masses(masses, f.root);
}

}  // namespace

std::vector<ParseMass> parse_masses(const Stsg& g, const DerivationForest& f,
                                    const BigInt& cap) {
  if (f.empty()) return {};
  // TreeNode has no ordering, so the DP keys on the canonical tree text.
  using Entry = std::tuple<std::string, Rational, BigInt>;
  auto combine = [&](const ElementaryTree& t, const std::vector<const Entry*>& choice) {
    TreeNode grafted = t.structure;
    std::vector<TreeNode> parsed;
    parsed.reserve(choice.size());
    for (const Entry* e : choice) parsed.push_back(parse_tree_text(std::get<0>(*e)));
    std::vector<const TreeNode*> substitutes;
    for (const auto& p : parsed) substitutes.push_back(&p);
    size_t cursor = 0;
    graft(g, grafted, substitutes, cursor);
    return format_tree(grafted);
  };
  auto entries = masses_dp<std::string>(g, f, cap, combine);
  std::vector<ParseMass> out;
  for (auto& [key, p, n] : entries) {
    out.push_back({parse_tree_text(key), std::move(p), std::move(n)});
  }
  return out;
}

std::vector<YieldMass> yield_masses(const Stsg& g, const DerivationForest& f,
                                    const BigInt& cap) {
  if (f.empty()) return {};
  using Entry = std::tuple<Sentence, Rational, BigInt>;
  auto combine = [&](const ElementaryTree& t, const std::vector<const Entry*>& choice) {
    Sentence out;
    size_t cursor = 0;
    for (const TreeNode* leaf : frontier(t.structure)) {
      if (g.is_nonterminal(leaf->symbol)) {
        const Sentence& sub = std::get<0>(*choice[cursor++]);
        out.insert(out.end(), sub.begin(), sub.end());
      } else {
        out.push_back(leaf->symbol);
      }
    }
    return out;
  };
  auto entries = masses_dp<Sentence>(g, f, cap, combine);
  std::vector<YieldMass> out;
  for (auto& [key, p, n] : entries) {
    out.push_back({std::move(key), std::move(p), std::move(n)});
  }
  return out;
}

}  // namespace stsg
