#include "stsg/wordgraph.hpp"

#include <sstream>

#include "stsg/errors.hpp"

namespace stsg {

WordGraph WordGraph::from_sentence(const Sentence& s) {
  WordGraph wg;
  wg.positions.reserve(s.size());
  for (const auto& w : s) {
    wg.positions.push_back({w});
  }
  return wg;
}

BigInt sentence_count(const WordGraph& wg) {
  BigInt count = 1;
  for (const auto& q : wg.positions) {
    count *= BigInt(q.size());
  }
  return count;
}

SentenceEnumerator::SentenceEnumerator(const WordGraph& wg)
    : wg_(wg), odometer_(wg.length(), 0), done_(wg.length() == 0) {
  for (const auto& q : wg_.positions) {
    if (q.empty()) done_ = true;
  }
}

bool SentenceEnumerator::next(Sentence& out) {
  if (done_) return false;
  out.clear();
  for (size_t i = 0; i < wg_.length(); ++i) {
    out.push_back(wg_.positions[i][odometer_[i]]);
  }
  // advance, least significant position last
  for (size_t i = wg_.length(); i-- > 0;) {
    if (++odometer_[i] < wg_.positions[i].size()) return true;
    odometer_[i] = 0;
  }
  done_ = true;
  return true;
}

std::vector<Sentence> sentences_of(const WordGraph& wg, const BigInt& cap) {
  BigInt count = sentence_count(wg);
  if (count > cap) {
    throw CapExceeded(count, "word-graph has " + count.str() + " sentences, cap " + cap.str());
  }
  std::vector<Sentence> out;
  SentenceEnumerator it(wg);
  Sentence s;
  while (it.next(s)) out.push_back(s);
  return out;
}

std::vector<std::string> validate_wordgraph(const Stsg& g, const WordGraph& wg) {
  std::vector<std::string> issues;
  if (wg.length() == 0) issues.push_back("word-graph has no positions");
  for (size_t i = 0; i < wg.length(); ++i) {
    if (wg.positions[i].empty()) {
      issues.push_back("position " + std::to_string(i + 1) + " is empty");
    }
    for (const auto& w : wg.positions[i]) {
      if (!g.is_terminal(w)) {
        issues.push_back("position " + std::to_string(i + 1) + ": '" + w +
                         "' is not a declared terminal");
      }
    }
  }
  return issues;
}

std::string format_wordgraph(const WordGraph& wg) {
  std::ostringstream out;
  out << "positions " << wg.length() << "\n";
  for (const auto& q : wg.positions) {
    for (size_t i = 0; i < q.size(); ++i) {
      out << (i ? " " : "") << q[i];
    }
    out << "\n";
  }
  return out.str();
}

WordGraph parse_wordgraph_text(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int line_number = 0;
  size_t expected = 0;
  bool header_seen = false;
  WordGraph wg;
  while (std::getline(in, line)) {
    ++line_number;
    std::istringstream ls(line);
    std::string first;
    if (!(ls >> first) || first[0] == '#') continue;
    if (!header_seen) {
      if (first != "positions") throw TextParseError("expected 'positions <L>' header", line_number);
      if (!(ls >> expected) || expected == 0) {
        throw TextParseError("bad position count", line_number);
      }
      header_seen = true;
      continue;
    }
    std::vector<std::string> q = {first};
    std::string w;
    while (ls >> w) q.push_back(w);
    wg.positions.push_back(std::move(q));
  }
  if (!header_seen) throw TextParseError("missing 'positions' header", line_number);
  if (wg.length() != expected) {
    throw TextParseError("declared " + std::to_string(expected) + " positions, found " +
                             std::to_string(wg.length()),
                         line_number);
  }
  return wg;
}

}  // namespace stsg
