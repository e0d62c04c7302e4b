// Command-line front end: gadget compilation, disambiguation, sampling,
// collapse, and end-to-end verification. Exit 0 on success / a "yes"
// decision, 1 on a "no" decision, 2 on any error.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "stsg/disambig.hpp"
#include "stsg/errors.hpp"
#include "stsg/forest.hpp"
#include "stsg/grammar.hpp"
#include "stsg/rational.hpp"
#include "stsg/reduction.hpp"
#include "stsg/sat_oracle.hpp"
#include "stsg/wordgraph.hpp"

namespace {

using namespace stsg;

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

void spit(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
}

std::string join(const Sentence& s) {
  std::string out;
  for (size_t i = 0; i < s.size(); ++i) {
    if (i > 0) out += ' ';
    out += s[i];
  }
  return out;
}

// A word-graph file starts with "positions L"; anything else is read as a
// whitespace-separated sentence (the singleton word-graph).
WordGraph load_wordgraph(const std::string& path) {
  std::string text = slurp(path);
  std::istringstream probe(text);
  std::string first;
  probe >> first;
  if (first == "positions") return parse_wordgraph_text(text);
  Sentence s;
  std::istringstream words(text);
  for (std::string w; words >> w;) s.push_back(w);
  if (s.empty()) throw std::runtime_error(path + ": empty sentence");
  return WordGraph::from_sentence(s);
}

int decide_and_print(const Rational& best, const std::optional<Rational>& threshold) {
  if (!threshold) return 0;
  bool yes = best >= *threshold;
  std::cout << "decision " << (yes ? "yes" : "no") << " threshold "
            << format_rational(*threshold) << "\n";
  return yes ? 0 : 1;
}

int cmd_reduce(const std::string& cnf_path, const std::string& variant,
               const std::string& out_dir) {
  Cnf3Formula f = parse_dimacs(slurp(cnf_path));
  std::filesystem::create_directories(out_dir);
  auto out = [&](const std::string& name) { return out_dir + "/" + name; };

  if (variant == "mpp") {
    auto red = build_mpp_reduction(f);
    spit(out("grammar.txt"), format_grammar(red.grammar));
    spit(out("sentence.txt"), join(red.sentence) + "\n");
    spit(out("meta.txt"), "variant mpp\ntheta " + format_rational(red.theta) +
                              "\nthreshold " + format_rational(red.threshold_q) + "\n");
  } else {
    auto red = build_mppwg_reduction(f);
    Stsg g = variant == "scfg" ? flatten_to_scfg(red.grammar) : red.grammar;
    spit(out("grammar.txt"), format_grammar(g));
    spit(out("wordgraph.txt"), format_wordgraph(red.word_graph));
    spit(out("meta.txt"), "variant " + variant + "\ntheta " + format_rational(red.theta) +
                              "\nthreshold " + format_rational(red.threshold_q) + "\n");
  }
  std::cout << "wrote " << out_dir << "\n";
  return 0;
}

int cmd_mpd(const std::string& grammar_path, const std::string& input_path,
            const std::optional<Rational>& threshold) {
  Stsg g = parse_grammar_text(slurp(grammar_path));
  WordGraph wg = load_wordgraph(input_path);
  auto r = mpd(g, wg);
  if (!r) {
    std::cout << "no derivation\n";
    return threshold ? 1 : 0;
  }
  std::cout << "mpd " << format_rational(r->probability) << "\n";
  std::cout << "derivation " << join(r->derivation.tree_ids) << "\n";
  return decide_and_print(r->probability, threshold);
}

int cmd_mpp(const std::string& grammar_path, const std::string& input_path,
            const std::optional<Rational>& threshold) {
  Stsg g = parse_grammar_text(slurp(grammar_path));
  WordGraph wg = load_wordgraph(input_path);
  auto r = mpp_exact(g, wg);
  if (!r) {
    std::cout << "no parse\n";
    return threshold ? 1 : 0;
  }
  std::cout << "mpp " << join(yield_of(g, r->parse)) << " "
            << format_rational(r->probability) << "\n";
  std::cout << "parse " << format_tree(r->parse) << "\n";
  return decide_and_print(r->probability, threshold);
}

int cmd_mps(const std::string& grammar_path, const std::string& input_path,
            const std::optional<Rational>& threshold) {
  Stsg g = parse_grammar_text(slurp(grammar_path));
  WordGraph wg = load_wordgraph(input_path);
  auto r = mps_exact(g, wg);
  if (!r) {
    std::cout << "no sentence\n";
    return threshold ? 1 : 0;
  }
  std::cout << "mps " << join(r->sentence) << " " << format_rational(r->probability) << "\n";
  return decide_and_print(r->probability, threshold);
}

int cmd_sample(const std::string& grammar_path, const std::string& input_path,
               std::int64_t samples, std::uint64_t seed) {
  Stsg g = parse_grammar_text(slurp(grammar_path));
  WordGraph wg = load_wordgraph(input_path);
  auto r = monte_carlo_mpp(g, wg, samples, seed);
  std::cout << "mpp " << join(yield_of(g, r.parse)) << " estimate " << r.frequency
            << " samples " << r.samples << " seed " << r.seed << "\n";
  std::cout << "parse " << format_tree(r.parse) << "\n";
  return 0;
}

int cmd_collapse(const std::string& grammar_path) {
  Stsg g = parse_grammar_text(slurp(grammar_path));
  std::cout << format_grammar(collapse_transform(g));
  return 0;
}

int cmd_verify(const std::optional<std::string>& cnf_path, int random_count,
               std::uint64_t seed, int max_n, int max_m) {
  bool all = true;
  if (cnf_path) {
    auto report = verify_answer_preservation(parse_dimacs(slurp(*cnf_path)));
    std::cout << report.to_text();
    all = report.all_pass();
  } else {
    std::mt19937_64 rng(seed);
    for (int i = 0; i < random_count; ++i) {
      Cnf3Formula f = random_formula(rng, max_n, max_m);
      auto report = verify_answer_preservation(f);
      bool pass = report.all_pass();
      std::cout << "instance " << (i + 1) << " " << (pass ? "pass" : "fail") << "\n";
      if (!pass) {
        std::cout << format_dimacs(f) << report.to_text();
        all = false;
      }
    }
  }
  std::cout << (all ? "verification pass\n" : "verification fail\n");
  return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"probabilistic tree-substitution grammar toolkit"};
  app.require_subcommand(1);

  std::string cnf_path, grammar_path, input_path, out_dir;
  std::string variant = "mppwg";
  std::string threshold_text;
  std::int64_t samples = 1000;
  std::uint64_t seed = 0;
  int random_count = 0, max_n = 4, max_m = 4;

  auto* reduce = app.add_subcommand("reduce", "compile a 3CNF formula into a gadget grammar");
  reduce->add_option("cnf", cnf_path, "DIMACS CNF file")->required();
  reduce->add_option("--variant", variant, "mppwg | mpp | scfg")
      ->check(CLI::IsMember({"mppwg", "mpp", "scfg"}));
  reduce->add_option("--out", out_dir, "output directory")->required();

  auto add_disambig = [&](const char* name, const char* help) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("grammar", grammar_path, "grammar file")->required();
    sub->add_option("input", input_path, "word-graph or sentence file")->required();
    sub->add_option("--threshold", threshold_text, "decision threshold num/den");
    return sub;
  };
  auto* mpd_cmd = add_disambig("mpd", "most probable derivation");
  auto* mpp_cmd = add_disambig("mpp", "most probable parse (exact)");
  auto* mps_cmd = add_disambig("mps", "most probable sentence (exact)");

  auto* sample = app.add_subcommand("sample", "Monte-Carlo most probable parse");
  sample->add_option("grammar", grammar_path)->required();
  sample->add_option("input", input_path)->required();
  sample->add_option("--samples", samples)->check(CLI::PositiveNumber);
  sample->add_option("--seed", seed);

  auto* collapse = app.add_subcommand("collapse", "print the collapse-transformed grammar");
  collapse->add_option("grammar", grammar_path)->required();

  auto* verify = app.add_subcommand("verify", "check that compiled gadgets preserve the SAT answer");
  verify->add_option("cnf", cnf_path, "DIMACS CNF file");
  verify->add_option("--random", random_count, "verify N random formulas instead");
  verify->add_option("--seed", seed);
  verify->add_option("--max-n", max_n)->check(CLI::Range(1, 4));
  verify->add_option("--max-m", max_m)->check(CLI::Range(1, 4));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    std::optional<Rational> threshold;
    if (!threshold_text.empty()) threshold = parse_rational(threshold_text);

    if (reduce->parsed()) return cmd_reduce(cnf_path, variant, out_dir);
    if (mpd_cmd->parsed()) return cmd_mpd(grammar_path, input_path, threshold);
    if (mpp_cmd->parsed()) return cmd_mpp(grammar_path, input_path, threshold);
    if (mps_cmd->parsed()) return cmd_mps(grammar_path, input_path, threshold);
    if (sample->parsed()) return cmd_sample(grammar_path, input_path, samples, seed);
    if (collapse->parsed()) return cmd_collapse(grammar_path);
    if (verify->parsed()) {
      if (cnf_path.empty() && random_count <= 0) {
        std::cerr << "error: verify needs a CNF file or --random N\n";
        return 2;
      }
      return cmd_verify(cnf_path.empty() ? std::nullopt : std::optional(cnf_path),
                        random_count, seed, max_n, max_m);
    }
  } catch (const TextParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const CapExceeded& e) {
    std::cerr << "error: " << e.what();
    if (e.count_known) std::cerr << " (exact count " << e.exact_count << ")";
    std::cerr << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
