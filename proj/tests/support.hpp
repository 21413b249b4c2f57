#pragma once

// Fixture builders and brute-force oracles shared by the unit tests and the
// acceptance runner. Oracles work from the model document and the raw
// input only; nothing here goes through the compiled grammar or the chart.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <regex>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "graphparse/candidate.hpp"
#include "graphparse/error.hpp"
#include "graphparse/forest.hpp"
#include "graphparse/grammar.hpp"
#include "graphparse/lexgraph.hpp"
#include "graphparse/model.hpp"
#include "graphparse/registry.hpp"

namespace gptest {

namespace gp = graphparse;

// ---- model builders -------------------------------------------------------

inline gp::ElementDef regex_element(std::string name, std::string expression) {
  gp::ElementDef e;
  e.name = std::move(name);
  e.kind = gp::ElementKind::lexical;
  gp::PatternSpec p;
  p.strategy = gp::PatternStrategy::regex;
  p.expression = std::move(expression);
  e.pattern = p;
  return e;
}

inline gp::ElementDef lexicon_element(std::string name, std::string word_class, bool open = false) {
  gp::ElementDef e;
  e.name = std::move(name);
  e.kind = gp::ElementKind::lexical;
  gp::PatternSpec p;
  p.strategy = gp::PatternStrategy::lexicon;
  p.lexicon_class = std::move(word_class);
  p.open = open;
  e.pattern = p;
  return e;
}

inline gp::MemberDef member(std::string name, std::string target) {
  gp::MemberDef m;
  m.name = std::move(name);
  m.target = std::move(target);
  return m;
}

inline gp::ElementDef composition(std::string name, std::vector<gp::MemberDef> members) {
  gp::ElementDef e;
  e.name = std::move(name);
  e.kind = gp::ElementKind::composition;
  e.members = std::move(members);
  return e;
}

inline gp::ElementDef alternative(std::string name, std::vector<std::string> variants) {
  gp::ElementDef e;
  e.name = std::move(name);
  e.kind = gp::ElementKind::alternative;
  e.variants = std::move(variants);
  return e;
}

inline gp::ElementDef with_value(gp::ElementDef e, double p) {
  e.probability.mode = gp::ProbabilityMode::value;
  e.probability.value = p;
  return e;
}

// S -> S S | a, written as S = alt{Pair, A}, Pair = {left: S, right: S}.
inline gp::LanguageModel catalan_model() {
  gp::LanguageModel m;
  m.name = "catalan";
  m.start = "S";
  m.elements = {alternative("S", {"Pair", "A"}),
                composition("Pair", {member("left", "S"), member("right", "S")}),
                regex_element("A", "a")};
  return m;
}

inline std::uint64_t catalan(unsigned n) {
  std::uint64_t c = 1;
  for (unsigned i = 0; i < n; ++i) c = c * 2 * (2 * i + 1) / (i + 2);
  return c;
}

inline std::string repeat_words(const std::string& word, std::size_t n) {
  std::string out;
  for (std::size_t i = 0; i < n; ++i) out += (i ? " " : "") + word;
  return out;
}

// Six-element toy PCFG: every element value-mode, no optional members and
// one reading per word.
inline gp::LanguageModel toy_pcfg() {
  gp::LanguageModel m;
  m.name = "toy-pcfg";
  m.start = "E";
  m.elements = {with_value(alternative("E", {"Pair", "Triple", "Word"}), 0.9),
                with_value(composition("Pair", {member("left", "E"), member("right", "E")}), 0.4),
                with_value(composition("Triple", {member("a", "E"), member("b", "E"), member("c", "E")}), 0.2),
                with_value(alternative("Word", {"N", "V"}), 0.8),
                with_value(regex_element("N", "n"), 0.7),
                with_value(regex_element("V", "v"), 0.3)};
  return m;
}

// Scan, parse and enumerate in one step; owns everything the forest
// points into. `trees` is empty when the input has no parse.
struct Parsed {
  gp::Registry registry = gp::Registry::with_builtins();
  gp::AlgebraRegistry algebras = gp::AlgebraRegistry::with_builtins();
  gp::Grammar grammar;
  std::optional<gp::ParseForest> forest;

  Parsed(const gp::LanguageModel& model, const std::string& input, const gp::Lexicon& lexicon = {})
      : grammar(gp::compile_grammar(model, registry)) {
    const auto graph = gp::scan(input, grammar.model(), lexicon, registry);
    try {
      forest = gp::parse(graph, grammar, registry);
    } catch (const gp::ParseError&) {
    }
  }

  std::uint64_t count() const { return forest ? forest->tree_count() : 0; }

  std::vector<gp::ParseGraphCandidate> trees(std::size_t k, const std::string& algebra = "probabilistic") const {
    if (!forest) return {};
    return gp::enumerate_graphs(*forest, k, algebras.get(algebra), registry, algebras);
  }
};

// ---- token path oracle ----------------------------------------------------

// Plain depth-first enumeration of start-to-end paths.
inline std::uint64_t dfs_paths(const gp::LexicalAnalysisGraph& g) {
  std::vector<std::vector<std::size_t>> out(g.tokens.size());
  for (const auto& [a, b] : g.edges) out[a].push_back(b);
  std::set<std::size_t> ends(g.end_tokens.begin(), g.end_tokens.end());
  std::uint64_t total = 0;
  std::function<void(std::size_t)> walk = [&](std::size_t v) {
    if (ends.count(v)) ++total;
    for (std::size_t w : out[v]) walk(w);
  };
  for (std::size_t s : g.start_tokens) walk(s);
  return total;
}

// Random layered token DAG over `words` word positions; returns a graph
// shaped like scan() output (tokens sorted by start).
inline gp::LexicalAnalysisGraph random_lexical_dag(std::mt19937_64& rng, std::size_t words,
                                                   std::size_t max_per_word) {
  gp::LexicalAnalysisGraph g;
  std::uniform_int_distribution<std::size_t> per(1, max_per_word);
  std::uniform_int_distribution<std::size_t> len(1, 3);
  struct Tok {
    std::size_t first, last;
  };
  std::vector<Tok> toks;
  for (std::size_t w = 0; w < words; ++w) {
    const std::size_t c = per(rng);
    for (std::size_t i = 0; i < c; ++i) {
      const std::size_t last = std::min(words - 1, w + len(rng) - 1);
      toks.push_back({w, last});
    }
  }
  for (std::size_t id = 0; id < toks.size(); ++id) {
    gp::TokenCandidate t;
    t.id = id;
    t.element = "T";
    t.span = {toks[id].first * 2, toks[id].last * 2 + 1};
    g.tokens.push_back(t);
    if (toks[id].first == 0) g.start_tokens.push_back(id);
    if (toks[id].last == words - 1) g.end_tokens.push_back(id);
  }
  for (std::size_t a = 0; a < toks.size(); ++a) {
    for (std::size_t b = 0; b < toks.size(); ++b) {
      if (toks[b].first == toks[a].last + 1) g.edges.emplace_back(a, b);
    }
  }
  return g;
}

// ---- tree oracle ----------------------------------------------------------

// A tree as the oracle sees it. Canonical text uses the same notation as
// ParseGraphCandidate::canonical so the two can be compared directly.
struct OracleTree {
  std::string canonical;
  double probability = 1.0;
};

struct OracleChild {
  std::size_t member;
  std::size_t first, last;  // word range
  std::string element;
  OracleTree tree;
};

// Exhaustive generate-and-filter enumeration. For each element and word
// range every labelled child sequence is generated and then filtered by
// the member rules (positional members in declaration order, floating
// anywhere, multiplicity bounds) and by the element's constraints.
// Scores: value-mode P(E), member presence terms and P(E|w) = 1 for
// regex tokens. Lexical elements must use regex patterns over single words.
class TreeOracle {
 public:
  TreeOracle(gp::LanguageModel model, std::string input, gp::Registry registry = gp::Registry::with_builtins())
      : model_(std::move(model)), input_(std::move(input)), registry_(std::move(registry)) {
    words_ = gp::split_words(input_);
  }

  std::vector<OracleTree> trees() { return trees(model_.start, 0, words_.size()); }

  // All trees of `element` over words [first, end).
  std::vector<OracleTree> trees(const std::string& element, std::size_t first, std::size_t end) {
    const auto key = std::make_tuple(element, first, end);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    // A finite tree never repeats an element over the same range along one
    // path (models with same-span cycles do not validate).
    if (!active_.insert(key).second) return {};
    std::vector<OracleTree> out = build(element, first, end);
    active_.erase(key);
    memo_[key] = out;
    return out;
  }

 private:
  std::size_t start_of(std::size_t w) const { return words_[w].start; }
  std::size_t end_of(std::size_t w) const { return words_[w].end; }
  std::string header(const std::string& element, std::size_t first, std::size_t end) const {
    return element + "@" + std::to_string(start_of(first)) + "-" + std::to_string(end_of(end - 1));
  }

  static double prior(const gp::ElementDef& e) {
    if (e.probability.mode == gp::ProbabilityMode::value) return *e.probability.value;
    return 1.0;
  }

  std::vector<OracleTree> build(const std::string& name, std::size_t first, std::size_t end) {
    const gp::ElementDef& e = *model_.find(name);
    std::vector<OracleTree> out;
    if (end <= first) return out;
    const std::string head = header(name, first, end);
    if (e.kind == gp::ElementKind::lexical) {
      if (end != first + 1) return out;
      const std::string lexeme = input_.substr(start_of(first), end_of(first) - start_of(first));
      if (std::regex_match(lexeme, std::regex(*e.pattern->expression))) {
        out.push_back({head + "\"" + lexeme + "\"", prior(e)});
      }
      return out;
    }
    if (e.kind == gp::ElementKind::alternative) {
      for (const auto& v : e.variants) {
        for (const auto& t : trees(v, first, end)) {
          out.push_back({head + "<" + t.canonical + ">", prior(e) * t.probability});
        }
      }
      return out;
    }
    std::vector<OracleChild> seq;
    sequences(e, first, end, seq, [&](const std::vector<OracleChild>& children) {
      if (!acceptable(e, children) || !constraints_hold(e, first, end, children)) return;
      std::string text = head + "{";
      double p = prior(e);
      for (std::size_t m = 0; m < e.members.size(); ++m) {
        bool present = false;
        std::string part = e.members[m].name + ":";
        for (const auto& c : children) {
          if (c.member != m) continue;
          present = true;
          part += c.tree.canonical + " ";
          p *= c.tree.probability;
        }
        if (present) text += part + ";";
        if (e.members[m].is_optional() && e.probability.mode == gp::ProbabilityMode::value) {
          auto it = e.probability.member_presence.find(e.members[m].name);
          const double q = it == e.probability.member_presence.end() ? 0.5 : it->second;
          p *= present ? q : 1.0 - q;
        }
      }
      out.push_back({text + "}", p});
    });
    return out;
  }

  void sequences(const gp::ElementDef& e, std::size_t pos, std::size_t end, std::vector<OracleChild>& seq,
                 const std::function<void(const std::vector<OracleChild>&)>& emit) {
    if (pos == end) {
      emit(seq);
      return;
    }
    for (std::size_t stop = pos + 1; stop <= end; ++stop) {
      for (std::size_t m = 0; m < e.members.size(); ++m) {
        const std::string& target = e.members[m].target;
        for (const auto& t : trees(target, pos, stop)) {
          seq.push_back({m, pos, stop - 1, target, t});
          sequences(e, stop, end, seq, emit);
          seq.pop_back();
        }
      }
    }
  }

  static bool acceptable(const gp::ElementDef& e, const std::vector<OracleChild>& children) {
    std::vector<std::size_t> count(e.members.size(), 0);
    std::size_t last_positional = 0;
    for (const auto& c : children) {
      ++count[c.member];
      if (e.members[c.member].floating) continue;
      if (c.member < last_positional) return false;
      last_positional = c.member;
    }
    for (std::size_t m = 0; m < e.members.size(); ++m) {
      const gp::MemberDef& d = e.members[m];
      if (d.multiplicity.many) {
        const std::size_t lo = d.optional ? 0 : static_cast<std::size_t>(d.multiplicity.min);
        if (count[m] < lo) return false;
      } else {
        if (count[m] > 1) return false;
        if (!d.optional && count[m] == 0) return false;
      }
    }
    return true;
  }

  bool constraints_hold(const gp::ElementDef& e, std::size_t first, std::size_t end,
                        const std::vector<OracleChild>& children) const {
    if (e.constraints.empty()) return true;
    const std::string_view text = input_;
    auto child_view = [&](const OracleChild& c) {
      const gp::Span s{start_of(c.first), end_of(c.last)};
      return gp::ChildView{c.element, s, text.substr(s.start, s.length())};
    };
    gp::InstanceView v;
    v.element = e.name;
    v.span = {start_of(first), end_of(end - 1)};
    v.text = text.substr(v.span.start, v.span.length());
    for (std::size_t m = 0; m < e.members.size(); ++m) {
      gp::MemberView mv{e.members[m].name, {}};
      for (const auto& c : children) {
        if (c.member == m) mv.children.push_back(child_view(c));
      }
      if (!mv.children.empty()) v.members.push_back(std::move(mv));
    }
    for (const auto& c : e.constraints) {
      const gp::ConstraintFn* fn = registry_.constraint(c.name);
      if (!(*fn)(v, c.params, gp::EvaluationContext{})) return false;
    }
    return true;
  }

  gp::LanguageModel model_;
  std::string input_;
  gp::Registry registry_;
  std::vector<gp::Word> words_;
  std::map<std::tuple<std::string, std::size_t, std::size_t>, std::vector<OracleTree>> memo_;
  std::set<std::tuple<std::string, std::size_t, std::size_t>> active_;
};

// Oracle trees sorted best first, ties by canonical text.
inline std::vector<OracleTree> ranked(std::vector<OracleTree> trees) {
  std::sort(trees.begin(), trees.end(), [](const OracleTree& a, const OracleTree& b) {
    if (a.probability != b.probability) return a.probability > b.probability;
    return a.canonical < b.canonical;
  });
  return trees;
}

// Compares a ranked tree list with an oracle list. Scores must agree within
// `tol`; inside a run of scores equal within `tol` the order is free.
inline bool same_ranking(const std::vector<gp::ParseGraphCandidate>& got,
                         const std::vector<OracleTree>& want, double tol, std::string* why = nullptr) {
  if (got.size() != want.size()) {
    if (why) *why = "sizes differ: " + std::to_string(got.size()) + " vs " + std::to_string(want.size());
    return false;
  }
  std::size_t i = 0;
  while (i < want.size()) {
    std::size_t j = i + 1;
    while (j < want.size() && std::fabs(want[j].probability - want[i].probability) <= tol) ++j;
    std::multiset<std::string> a, b;
    for (std::size_t x = i; x < j; ++x) {
      if (std::fabs(got[x].score.value() - want[x].probability) > tol) {
        if (why) *why = "score mismatch at rank " + std::to_string(x);
        return false;
      }
      a.insert(got[x].canonical());
      b.insert(want[x].canonical);
    }
    if (a != b) {
      if (why) *why = "trees differ in ranks " + std::to_string(i) + ".." + std::to_string(j - 1);
      return false;
    }
    i = j;
  }
  return true;
}

// ---- random grammars ------------------------------------------------------

// A small acyclic grammar: non-lexical elements only target later elements;
// the last three are regex tokens over the words "a" and "b". Returns false
// when the draw does not validate.
inline bool random_grammar(std::mt19937_64& rng, gp::LanguageModel& out) {
  std::uniform_int_distribution<int> pct(0, 99);
  const std::size_t inner = 2 + rng() % 3;
  out = {};
  out.name = "random";
  out.start = "E0";
  std::vector<std::string> names;
  for (std::size_t i = 0; i < inner; ++i) names.push_back("E" + std::to_string(i));
  names.insert(names.end(), {"LA", "LB", "LAB"});
  for (std::size_t i = 0; i < inner; ++i) {
    auto later = [&] { return names[i + 1 + rng() % (names.size() - i - 1)]; };
    if (pct(rng) < 30) {
      std::vector<std::string> variants;
      const std::size_t n = 1 + rng() % 2;
      for (std::size_t v = 0; v < n; ++v) {
        std::string t = later();
        if (std::find(variants.begin(), variants.end(), t) == variants.end()) variants.push_back(t);
      }
      out.elements.push_back(alternative(names[i], variants));
      continue;
    }
    std::vector<gp::MemberDef> members;
    const std::size_t n = 1 + rng() % 3;
    for (std::size_t k = 0; k < n; ++k) {
      gp::MemberDef m = member("m" + std::to_string(k), later());
      const int r = pct(rng);
      if (r < 20) {
        m.optional = true;
      } else if (r < 40) {
        m.multiplicity = gp::Multiplicity::at_least(static_cast<std::int64_t>(rng() % 3));
      }
      m.floating = pct(rng) < 15;
      members.push_back(m);
    }
    gp::ElementDef e = composition(names[i], members);
    if (pct(rng) < 50) {
      e.probability.mode = gp::ProbabilityMode::value;
      e.probability.value = 0.1 + 0.1 * static_cast<double>(rng() % 9);
      for (const auto& m : members) {
        if (m.is_optional()) e.probability.member_presence[m.name] = 0.1 + 0.1 * static_cast<double>(rng() % 9);
      }
    }
    out.elements.push_back(e);
  }
  out.elements.push_back(regex_element("LA", "a"));
  out.elements.push_back(regex_element("LB", "b"));
  out.elements.push_back(regex_element("LAB", "a|b"));
  return !gp::has_errors(gp::validate_model(out));
}

inline std::string random_ab(std::mt19937_64& rng, std::size_t words) {
  std::string s;
  for (std::size_t i = 0; i < words; ++i) s += std::string(i ? " " : "") + (rng() % 2 ? "a" : "b");
  return s;
}

// A random a/b input with at least one analysis under `model`, judged by
// the oracle; falls back to the last draw when none turns up.
inline std::string productive_input(std::mt19937_64& rng, const gp::LanguageModel& model, std::size_t max_words) {
  std::string input;
  for (int attempt = 0; attempt < 40; ++attempt) {
    input = random_ab(rng, 1 + rng() % max_words);
    if (!TreeOracle(model, input).trees().empty()) break;
  }
  return input;
}

// One constraint drawn at random and attached to a random composition.
inline bool add_random_constraint(std::mt19937_64& rng, gp::LanguageModel& model) {
  std::vector<std::size_t> comps;
  for (std::size_t i = 0; i < model.elements.size(); ++i) {
    if (model.elements[i].kind == gp::ElementKind::composition) comps.push_back(i);
  }
  if (comps.empty()) return false;
  gp::ElementDef& e = model.elements[comps[rng() % comps.size()]];
  const auto pick = [&] { return e.members[rng() % e.members.size()].name; };
  gp::ConstraintSpec c;
  switch (rng() % 3) {
    case 0:
      c.name = "requires_member";
      c.params = {{"member", pick()}};
      break;
    case 1:
      c.name = "precedes";
      c.params = {{"first", pick()}, {"second", pick()}};
      break;
    default:
      c.name = "member_equals";
      c.params = {{"member", pick()}, {"lexeme", rng() % 2 ? "a" : "b"}};
      break;
  }
  e.constraints.push_back(c);
  return true;
}

// ---- tree shapes for the resolver -----------------------------------------

// Random tree of `n` instances; instance spans nest properly and siblings
// are disjoint. Ids are preorder positions as in real candidates.
inline gp::ParseGraphCandidate random_tree(std::mt19937_64& rng, std::size_t n) {
  std::vector<std::size_t> parent(n, gp::npos);
  for (std::size_t i = 1; i < n; ++i) parent[i] = rng() % i;
  std::vector<std::vector<std::size_t>> kids(n);
  for (std::size_t i = 1; i < n; ++i) kids[parent[i]].push_back(i);

  gp::ParseGraphCandidate t;
  std::vector<std::size_t> id_of(n);
  std::size_t cursor = 0;
  std::function<void(std::size_t, std::size_t)> place = [&](std::size_t v, std::size_t par) {
    const std::size_t id = t.instances.size();
    id_of[v] = id;
    gp::ElementInstance inst;
    inst.id = id;
    inst.element = "N" + std::to_string(v);
    inst.parent = par;
    inst.span.start = cursor;
    t.instances.push_back(inst);
    if (kids[v].empty()) cursor += 1 + rng() % 3;
    for (std::size_t c : kids[v]) {
      t.instances[id].children.push_back(t.instances.size());
      place(c, id);
      cursor += rng() % 2;
    }
    t.instances[id].span.end = cursor;
  };
  place(0, gp::npos);
  t.text = std::string(cursor, 'x');
  return t;
}

// Smallest connected vertex set containing both nodes, found by trying
// every subset in increasing size.
inline std::vector<std::size_t> minimal_connected_subgraph(const gp::ParseGraphCandidate& t, std::size_t a,
                                                           std::size_t b) {
  const std::size_t n = t.instances.size();
  std::vector<std::uint32_t> masks;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) masks.push_back(mask);
  std::stable_sort(masks.begin(), masks.end(),
                   [](std::uint32_t x, std::uint32_t y) { return __builtin_popcount(x) < __builtin_popcount(y); });
  for (std::uint32_t mask : masks) {
    if (!(mask >> a & 1) || !(mask >> b & 1)) continue;
    // connectivity through parent links restricted to the subset
    std::uint32_t reached = 1u << a;
    bool grew = true;
    while (grew) {
      grew = false;
      for (std::size_t v = 0; v < n; ++v) {
        if (!(mask >> v & 1) || (reached >> v & 1)) continue;
        const std::size_t p = t.instances[v].parent;
        bool link = p != gp::npos && (reached >> p & 1);
        for (std::size_t c : t.instances[v].children) link = link || (reached >> c & 1);
        if (link) {
          reached |= 1u << v;
          grew = true;
        }
      }
    }
    if (reached == mask) {
      std::vector<std::size_t> out;
      for (std::size_t v = 0; v < n; ++v) {
        if (mask >> v & 1) out.push_back(v);
      }
      return out;
    }
  }
  return {};
}

// ---- DOT checker ----------------------------------------------------------

// Accepts the subset of DOT the exporters write: one or more
// `digraph ID { ... }` blocks whose statements are graph attributes
// (`a=b;`), node statements (`ID [k="v", ...];`) and edge statements
// (`ID -> ID [..];`). Edges must join declared nodes.
inline bool valid_dot(const std::string& text, std::string* why = nullptr) {
  std::size_t i = 0;
  auto fail = [&](const std::string& m) {
    if (why) *why = m + " at byte " + std::to_string(i);
    return false;
  };
  auto skip = [&] {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
  };
  auto ident = [&](std::string& out) {
    skip();
    const std::size_t b = i;
    while (i < text.size() && (std::isalnum(static_cast<unsigned char>(text[i])) || text[i] == '_')) ++i;
    out = text.substr(b, i - b);
    return !out.empty();
  };
  auto quoted = [&] {
    skip();
    if (i >= text.size() || text[i] != '"') return false;
    for (++i; i < text.size(); ++i) {
      if (text[i] == '\\') {
        ++i;
        continue;
      }
      if (text[i] == '\n') return false;
      if (text[i] == '"') {
        ++i;
        return true;
      }
    }
    return false;
  };
  auto value = [&] {
    skip();
    if (i < text.size() && text[i] == '"') return quoted();
    std::string v;
    return ident(v);
  };
  auto expect = [&](char c) {
    skip();
    if (i < text.size() && text[i] == c) {
      ++i;
      return true;
    }
    return false;
  };
  auto attrs = [&] {
    if (!expect('[')) return true;
    while (true) {
      std::string k;
      if (!ident(k) || !expect('=') || !value()) return false;
      if (expect(']')) return true;
      if (!expect(',')) return false;
    }
  };
  std::size_t graphs = 0;
  while (true) {
    skip();
    if (i == text.size()) break;
    std::string kw, name;
    if (!ident(kw) || kw != "digraph") return fail("expected digraph");
    if (!ident(name)) return fail("expected graph name");
    if (!expect('{')) return fail("expected {");
    std::set<std::string> nodes;
    std::vector<std::pair<std::string, std::string>> edges;
    while (!expect('}')) {
      std::string a;
      if (!ident(a)) return fail("expected statement");
      skip();
      if (text.compare(i, 2, "->") == 0) {
        i += 2;
        std::string b;
        if (!ident(b)) return fail("expected edge target");
        edges.emplace_back(a, b);
        if (!attrs()) return fail("bad edge attributes");
      } else if (expect('=')) {
        if (!value()) return fail("bad graph attribute");
      } else {
        if (!nodes.insert(a).second) return fail("node declared twice");
        if (!attrs()) return fail("bad node attributes");
      }
      if (!expect(';')) return fail("expected ;");
    }
    for (const auto& [a, b] : edges) {
      if (!nodes.count(a) || !nodes.count(b)) return fail("edge to undeclared node " + a + "->" + b);
    }
    ++graphs;
  }
  if (graphs == 0) return fail("no graph");
  return true;
}

// ---- structural shapes ----------------------------------------------------

// Expected tree outline. A shape with text and no children matches any
// instance of that element covering exactly that text.
struct Shape {
  std::string element;
  std::string text;
  std::vector<Shape> children;
};

// Alternatives are transparent: an instance chosen as a variant is seen
// through to the variant itself.
inline std::size_t see_through(const gp::ParseGraphCandidate& t, std::size_t id) {
  while (t.at(id).variant && t.at(id).children.size() == 1) id = t.at(id).children.front();
  return id;
}

inline bool matches(const gp::ParseGraphCandidate& t, std::size_t id, const Shape& s, std::string* why = nullptr) {
  id = see_through(t, id);
  const gp::ElementInstance& inst = t.at(id);
  auto fail = [&](const std::string& m) {
    if (why && why->empty()) *why = m + " at instance " + std::to_string(id) + " (" + inst.element + ")";
    return false;
  };
  if (inst.element != s.element) return fail("expected " + s.element);
  if (!s.text.empty() && t.text.substr(inst.span.start, inst.span.length()) != s.text) {
    return fail("expected text '" + s.text + "'");
  }
  if (s.children.empty()) return true;
  if (inst.children.size() != s.children.size()) return fail("child count differs");
  for (std::size_t i = 0; i < s.children.size(); ++i) {
    if (!matches(t, inst.children[i], s.children[i], why)) return false;
  }
  return true;
}

// ---- reference fixtures --------------------------------------------------

// Names and pronouns; every pronoun points back (or forward) at a name.
inline gp::LanguageModel pronoun_model(bool allow_unresolved = false) {
  gp::LanguageModel m;
  m.name = "pronouns";
  m.start = "S";
  gp::MemberDef items = member("items", "Item");
  items.multiplicity = gp::Multiplicity::at_least(1);
  gp::MemberDef target = member("target", "Name");
  target.reference = true;
  target.reference_form = "Pron";
  target.allow_unresolved = allow_unresolved;
  m.elements = {composition("S", {items}), alternative("Item", {"Name", "Ref"}),
                regex_element("Name", "[A-Z][a-z]*"), composition("Ref", {target}),
                regex_element("Pron", "it")};
  return m;
}

inline gp::ParseGraphCandidate only_tree(const gp::LanguageModel& m, const std::string& input) {
  Parsed p(m, input);
  if (p.count() != 1) throw std::logic_error("expected exactly one tree for '" + input + "'");
  return p.trees(1).front();
}

inline std::vector<std::size_t> ids_of(const gp::ParseGraphCandidate& t, const std::string& element) {
  std::vector<std::size_t> out;
  for (const auto& inst : t.instances) {
    if (inst.element == element) out.push_back(inst.id);
  }
  return out;
}

inline double mean_word_length(const std::string& input) {
  std::istringstream in(input);
  std::string w;
  double total = 0;
  int n = 0;
  while (in >> w) {
    total += static_cast<double>(w.size());
    ++n;
  }
  return total / n;
}

// Every assignment of names to pronouns with its expected score, keyed by
// the (pronoun -> name or -1) map.
inline std::map<std::vector<long>, double> brute_force_assignments(const gp::ParseGraphCandidate& t, const std::string& input,
                                                bool allow_unresolved) {
  const auto refs = ids_of(t, "Ref");
  const auto names = ids_of(t, "Name");
  std::vector<long> options(names.begin(), names.end());
  if (names.empty() || allow_unresolved) options.push_back(-1);
  const double scale = 5.0 * mean_word_length(input);

  std::map<std::vector<long>, double> out;
  std::vector<long> pick(refs.size());
  std::function<void(std::size_t, double)> go = [&](std::size_t i, double s) {
    if (i == refs.size()) {
      out[pick] = s;
      return;
    }
    for (long o : options) {
      pick[i] = o;
      double v = 0.1;
      if (o >= 0) {
        const double d = std::fabs(double(t.at(o).span.start) - double(t.at(refs[i]).span.start));
        v = std::pow(0.5, d / scale);
      }
      go(i + 1, s * v);
    }
  };
  go(0, t.score.value());
  return out;
}

// ---- demo sentence shapes ------------------------------------------------

inline Shape lex(const char* element, const char* text) { return Shape{element, text, {}}; }

// The intended reading of the demo sentence: the prepositional phrase
// attaches to "picture".
inline Shape noun_attachment() {
  return Shape{"Sentence", "",
               {Shape{"SimpleClause", "",
                      {Shape{"NominalPhrase", "", {lex("Pronoun", "I")}},
                       Shape{"VerbalPhrase", "", {lex("Verb", "saw")}},
                       Shape{"NominalPhrase", "",
                             {lex("Determiner", "a"), lex("CommonNoun", "picture"),
                              Shape{"PrepositionalPhrase", "",
                                    {lex("Preposition", "of"),
                                     Shape{"NominalPhrase", "", {lex("ProperNoun", "New York")}}}}}}}}}};
}

inline Shape verb_attachment() {
  return Shape{"Sentence", "",
               {Shape{"SimpleClause", "",
                      {Shape{"NominalPhrase", "", {lex("Pronoun", "I")}},
                       Shape{"VerbalPhrase", "", {lex("Verb", "saw")}},
                       Shape{"NominalPhrase", "", {lex("Determiner", "a"), lex("CommonNoun", "picture")}},
                       Shape{"PrepositionalPhrase", "",
                             {lex("Preposition", "of"),
                              Shape{"NominalPhrase", "", {lex("ProperNoun", "New York")}}}}}}}};
}

}  // namespace gptest
