#pragma once

#include <string>
#include <vector>

#include "stsg/grammar.hpp"

namespace stsg {

// Sausage lattice: one nonempty terminal set per position.
struct WordGraph {
  std::vector<std::vector<std::string>> positions;

  size_t length() const { return positions.size(); }
  static WordGraph from_sentence(const Sentence& s);
};

BigInt sentence_count(const WordGraph& wg);

// Odometer over Q_1 x ... x Q_L, lexicographic in the per-position set order.
class SentenceEnumerator {
 public:
  explicit SentenceEnumerator(const WordGraph& wg);
  bool next(Sentence& out);

 private:
  const WordGraph& wg_;
  std::vector<size_t> odometer_;
  bool done_;
};

// Eager enumeration; throws CapExceeded when more than cap sentences exist.
std::vector<Sentence> sentences_of(const WordGraph& wg, const BigInt& cap = BigInt(1) << 20);

std::vector<std::string> validate_wordgraph(const Stsg& g, const WordGraph& wg);

std::string format_wordgraph(const WordGraph& wg);
WordGraph parse_wordgraph_text(const std::string& text);

}  // namespace stsg
