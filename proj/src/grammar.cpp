#include "stsg/grammar.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "stsg/errors.hpp"

namespace stsg {

const ElementaryTree* Stsg::find_tree(const std::string& id) const {
  for (const auto& t : trees) {
    if (t.id == id) return &t;
  }
  return nullptr;
}

std::vector<const ElementaryTree*> Stsg::trees_rooted_at(const std::string& nt) const {
  std::vector<const ElementaryTree*> out;
  for (const auto& t : trees) {
    if (t.root() == nt) out.push_back(&t);
  }
  return out;
}

std::vector<const TreeNode*> frontier(const TreeNode& t) {
  std::vector<const TreeNode*> out;
  if (t.is_leaf()) {
    out.push_back(&t);
    return out;
  }
  for (const auto& c : t.children) {
    auto sub = frontier(c);
    out.insert(out.end(), sub.begin(), sub.end());
  }
  return out;
}

const TreeNode* leftmost_open(const Stsg& g, const TreeNode& t) {
  for (const TreeNode* leaf : frontier(t)) {
    if (g.is_nonterminal(leaf->symbol)) return leaf;
  }
  return nullptr;
}

namespace {

// Replaces the left-most open leaf; returns true when a substitution happened.
bool substitute_leftmost(const Stsg& g, TreeNode& node, const ElementaryTree& t1,
                         bool& root_mismatch) {
  if (node.is_leaf()) {
    if (!g.is_nonterminal(node.symbol)) return false;
    if (node.symbol != t1.root()) {
      root_mismatch = true;
      return false;
    }
    node = t1.structure;
    return true;
  }
  for (auto& c : node.children) {
    if (substitute_leftmost(g, c, t1, root_mismatch)) return true;
    if (root_mismatch) return false;
  }
  return false;
}

}  // namespace

TreeNode leftmost_substitute(const Stsg& g, const TreeNode& t, const ElementaryTree& t1) {
  TreeNode result = t;
  bool root_mismatch = false;
  if (substitute_leftmost(g, result, t1, root_mismatch)) return result;
  if (root_mismatch) {
    const TreeNode* open = leftmost_open(g, t);
    throw RootMismatch("left-most open tree '" + open->symbol + "' does not match root '" +
                       t1.root() + "' of tree " + t1.id);
  }
  throw NoOpenTree("tree has an all-terminal frontier");
}

TreeNode derive(const Stsg& g, const Derivation& d) {
  if (d.tree_ids.empty()) throw IncompleteDerivation("empty derivation");
  const ElementaryTree* first = g.find_tree(d.tree_ids.front());
  if (first == nullptr) throw UnknownTree("unknown tree id '" + d.tree_ids.front() + "'");
  if (first->root() != g.start) {
    throw RootMismatch("derivation must start from a tree rooted at " + g.start);
  }
  TreeNode result = first->structure;
  for (size_t i = 1; i < d.tree_ids.size(); ++i) {
    const ElementaryTree* t = g.find_tree(d.tree_ids[i]);
    if (t == nullptr) throw UnknownTree("unknown tree id '" + d.tree_ids[i] + "'");
    result = leftmost_substitute(g, result, *t);
  }
  if (leftmost_open(g, result) != nullptr) {
    throw IncompleteDerivation("open trees remain after the last step");
  }
  return result;
}

Rational derivation_probability(const Stsg& g, const Derivation& d) {
  Rational p = 1;
  for (const auto& id : d.tree_ids) {
    const ElementaryTree* t = g.find_tree(id);
    if (t == nullptr) throw UnknownTree("unknown tree id '" + id + "'");
    p *= t->probability;
  }
  return p;
}

Sentence yield_of(const Stsg& g, const TreeNode& tree) {
  Sentence out;
  for (const TreeNode* leaf : frontier(tree)) {
    if (g.is_terminal(leaf->symbol)) out.push_back(leaf->symbol);
  }
  return out;
}

std::vector<std::string> validate_grammar(const Stsg& g) {
  std::vector<std::string> issues;
  if (g.start.empty()) {
    issues.push_back("no start symbol");
  } else if (!g.is_nonterminal(g.start)) {
    issues.push_back("start symbol '" + g.start + "' is not a declared nonterminal");
  }
  for (const auto& s : g.terminals) {
    if (g.nonterminals.count(s) > 0) {
      issues.push_back("symbol '" + s + "' declared both terminal and nonterminal");
    }
  }

  std::set<std::string> ids;
  std::map<std::string, std::string> structures;  // formatted tree -> id
  std::map<std::string, Rational> root_sums;
  std::set<std::string> open_symbols;

  for (const auto& t : g.trees) {
    if (!ids.insert(t.id).second) {
      issues.push_back("duplicate tree id '" + t.id + "'");
    }
    if (!g.is_nonterminal(t.root())) {
      issues.push_back("tree " + t.id + ": root '" + t.root() + "' is not a nonterminal");
      continue;
    }
    if (t.structure.is_leaf()) {
      issues.push_back("tree " + t.id + ": depth must be at least 1");
      continue;
    }
    bool shape_ok = true;
    std::vector<const TreeNode*> stack = {&t.structure};
    while (!stack.empty()) {
      const TreeNode* node = stack.back();
      stack.pop_back();
      bool declared = g.is_terminal(node->symbol) || g.is_nonterminal(node->symbol);
      if (!declared) {
        issues.push_back("tree " + t.id + ": undeclared symbol '" + node->symbol + "'");
        shape_ok = false;
      }
      if (!node->is_leaf() && !g.is_nonterminal(node->symbol)) {
        issues.push_back("tree " + t.id + ": internal node '" + node->symbol +
                         "' is not a nonterminal");
        shape_ok = false;
      }
      if (node->is_leaf() && g.is_nonterminal(node->symbol)) {
        open_symbols.insert(node->symbol);
      }
      for (const auto& c : node->children) stack.push_back(&c);
    }
    if (t.probability <= 0 || t.probability > 1) {
      issues.push_back("tree " + t.id + ": probability " + format_rational(t.probability) +
                       " outside (0,1]");
    }
    if (shape_ok) {
      auto [it, fresh] = structures.emplace(format_tree(t.structure), t.id);
      if (!fresh) {
        issues.push_back("tree " + t.id + ": duplicate structure of tree " + it->second);
      }
      root_sums[t.root()] += t.probability;
    }
  }

  for (const auto& [root, sum] : root_sums) {
    if (sum != 1) {
      issues.push_back("root " + root + " sums to " + format_rational(sum));
    }
  }
  for (const auto& nt : open_symbols) {
    if (root_sums.count(nt) == 0) {
      issues.push_back("nonterminal '" + nt + "' appears as an open tree but roots no tree");
    }
  }
  return issues;
}

// --------------------------------------------------------------------------
// Text formats

std::string format_tree(const TreeNode& t) {
  if (t.is_leaf()) return t.symbol;
  std::string out = "(" + t.symbol;
  for (const auto& c : t.children) {
    out += " " + format_tree(c);
  }
  out += ")";
  return out;
}

namespace {

std::vector<std::string> tokenize_sexpr(const std::string& text) {
  std::vector<std::string> tokens;
  std::string cur;
  for (char ch : text) {
    if (ch == '(' || ch == ')') {
      if (!cur.empty()) {
        tokens.push_back(cur);
        cur.clear();
      }
      tokens.push_back(std::string(1, ch));
    } else if (std::isspace(static_cast<unsigned char>(ch))) {
      if (!cur.empty()) {
        tokens.push_back(cur);
        cur.clear();
      }
    } else {
      cur.push_back(ch);
    }
  }
  if (!cur.empty()) tokens.push_back(cur);
  return tokens;
}

TreeNode parse_sexpr(const std::vector<std::string>& tokens, size_t& pos) {
  if (pos >= tokens.size()) throw std::invalid_argument("unexpected end of tree text");
  if (tokens[pos] == "(") {
    ++pos;
    if (pos >= tokens.size() || tokens[pos] == "(" || tokens[pos] == ")") {
      throw std::invalid_argument("expected node symbol after '('");
    }
    TreeNode node{tokens[pos++], {}};
    while (pos < tokens.size() && tokens[pos] != ")") {
      node.children.push_back(parse_sexpr(tokens, pos));
    }
    if (pos >= tokens.size()) throw std::invalid_argument("missing ')'");
    ++pos;  // consume ')'
    return node;
  }
  if (tokens[pos] == ")") throw std::invalid_argument("unexpected ')'");
  return TreeNode{tokens[pos++], {}};
}

}  // namespace

TreeNode parse_tree_text(const std::string& text) {
  auto tokens = tokenize_sexpr(text);
  size_t pos = 0;
  TreeNode node = parse_sexpr(tokens, pos);
  if (pos != tokens.size()) throw std::invalid_argument("trailing tokens after tree");
  return node;
}

std::string format_grammar(const Stsg& g) {
  std::ostringstream out;
  out << "start " << g.start << "\n";
  out << "nonterminal";
  for (const auto& s : g.nonterminals) out << " " << s;
  out << "\n";
  out << "terminal";
  for (const auto& s : g.terminals) out << " " << s;
  out << "\n";
  for (const auto& t : g.trees) {
    out << "tree " << t.id << " " << format_rational(t.probability) << " "
        << format_tree(t.structure) << "\n";
  }
  return out.str();
}

Stsg parse_grammar_text(const std::string& text) {
  Stsg g;
  std::istringstream in(text);
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    std::istringstream ls(line);
    std::string keyword;
    if (!(ls >> keyword) || keyword[0] == '#') continue;
    if (keyword == "start") {
      if (!(ls >> g.start)) throw TextParseError("missing start symbol", line_number);
    } else if (keyword == "nonterminal" || keyword == "terminal") {
      std::string name;
      while (ls >> name) {
        (keyword == "terminal" ? g.terminals : g.nonterminals).insert(name);
      }
    } else if (keyword == "tree") {
      std::string id, prob;
      if (!(ls >> id >> prob)) throw TextParseError("tree line needs id and probability", line_number);
      std::string rest;
      std::getline(ls, rest);
      try {
        g.trees.push_back({id, parse_rational(prob), parse_tree_text(rest)});
      } catch (const std::invalid_argument& e) {
        throw TextParseError(e.what(), line_number);
      }
    } else {
      throw TextParseError("unknown directive '" + keyword + "'", line_number);
    }
  }
  return g;
}

}  // namespace stsg
