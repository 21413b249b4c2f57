#include <algorithm>
#include <map>
#include <regex>
#include <stdexcept>

#include "graphparse/error.hpp"
#include "graphparse/lexgraph.hpp"

namespace graphparse {

std::vector<std::size_t> LexicalAnalysisGraph::successors(std::size_t token) const {
  std::vector<std::size_t> out;
  auto it = std::lower_bound(edges.begin(), edges.end(), std::make_pair(token, std::size_t{0}));
  for (; it != edges.end() && it->first == token; ++it) out.push_back(it->second);
  return out;
}

std::size_t whitespace_length(std::string_view text, std::size_t offset) {
  if (offset >= text.size()) return 0;
  const auto byte = [&](std::size_t i) { return static_cast<unsigned char>(text[i]); };
  const unsigned char b0 = byte(offset);
  if (b0 < 0x80) {
    return (b0 == ' ' || (b0 >= 0x09 && b0 <= 0x0D)) ? 1 : 0;
  }
  std::size_t len = 0;
  char32_t cp = 0;
  if ((b0 & 0xE0) == 0xC0) {
    len = 2;
    cp = b0 & 0x1F;
  } else if ((b0 & 0xF0) == 0xE0) {
    len = 3;
    cp = b0 & 0x0F;
  } else {
    return 0;
  }
  if (offset + len > text.size()) return 0;
  for (std::size_t i = 1; i < len; ++i) {
    if ((byte(offset + i) & 0xC0) != 0x80) return 0;
    cp = (cp << 6) | (byte(offset + i) & 0x3F);
  }
  const bool space = cp == 0x85 || cp == 0xA0 || cp == 0x1680 || (cp >= 0x2000 && cp <= 0x200A) ||
                     cp == 0x2028 || cp == 0x2029 || cp == 0x202F || cp == 0x205F || cp == 0x3000;
  return space ? len : 0;
}

std::vector<Word> split_words(std::string_view text) {
  std::vector<Word> words;
  std::size_t i = 0;
  constexpr std::size_t none = static_cast<std::size_t>(-1);
  std::size_t start = none;
  while (i < text.size()) {
    std::size_t ws = whitespace_length(text, i);
    if (ws > 0) {
      if (start != none) words.push_back({start, i});
      start = none;
      i += ws;
    } else {
      if (start == none) start = i;
      ++i;
    }
  }
  if (start != none) words.push_back({start, text.size()});
  return words;
}

namespace {

struct Emitted {
  std::size_t first_word;
  std::size_t last_word;
  std::size_t element;
  double prob;
};

std::string joined_words(std::string_view input, const std::vector<Word>& words, std::size_t first,
                         std::size_t last) {
  std::string out;
  for (std::size_t w = first; w <= last; ++w) {
    if (w > first) out.push_back(' ');
    out.append(input.substr(words[w].start, words[w].end - words[w].start));
  }
  return out;
}

}  // namespace

LexicalAnalysisGraph scan(std::string_view input, const LanguageModel& model, const Lexicon& lexicon,
                          const Registry& registry) {
  LexicalAnalysisGraph graph;
  graph.input = std::string(input);
  graph.words = split_words(input);
  const auto& words = graph.words;
  const std::size_t n = words.size();
  if (n == 0) return graph;

  std::vector<Emitted> emitted;
  const auto open = open_classes(model);

  // Lexicon-backed elements grouped by word class.
  std::multimap<std::string, std::size_t> by_class;
  std::vector<std::size_t> open_elements;
  for (std::size_t i = 0; i < model.elements.size(); ++i) {
    const ElementDef& e = model.elements[i];
    if (e.kind != ElementKind::lexical || !e.pattern) continue;
    if (e.pattern->strategy == PatternStrategy::lexicon && e.pattern->lexicon_class) {
      by_class.emplace(*e.pattern->lexicon_class, i);
      if (e.pattern->open) open_elements.push_back(i);
    }
  }
  if (!by_class.empty()) {
    const std::size_t longest = std::max<std::size_t>(lexicon.max_words(), 1);
    for (std::size_t first = 0; first < n; ++first) {
      for (std::size_t len = 1; len <= longest && first + len <= n; ++len) {
        const std::string text = joined_words(input, words, first, first + len - 1);
        const auto known = lexicon.lookup(text);
        if (known.empty() && len > 1) continue;
        const auto dist = pos_distribution(lexicon, text, open);
        for (const auto& [cls, prob] : dist) {
          if (prob <= 0) continue;
          auto [lo, hi] = by_class.equal_range(cls);
          for (auto it = lo; it != hi; ++it) {
            const bool allowed = !known.empty() || std::find(open_elements.begin(), open_elements.end(),
                                                             it->second) != open_elements.end();
            if (allowed) emitted.push_back({first, first + len - 1, it->second, prob});
          }
        }
      }
    }
  }

  for (std::size_t i = 0; i < model.elements.size(); ++i) {
    const ElementDef& e = model.elements[i];
    if (e.kind != ElementKind::lexical || !e.pattern) continue;
    if (e.pattern->strategy == PatternStrategy::regex && e.pattern->expression) {
      const std::regex re(*e.pattern->expression, std::regex::ECMAScript);
      for (std::size_t first = 0; first < n; ++first) {
        for (std::size_t last = first; last < n; ++last) {
          const std::string slice(input.substr(words[first].start, words[last].end - words[first].start));
          if (std::regex_match(slice, re)) emitted.push_back({first, last, i, 1.0});
        }
      }
    } else if (e.pattern->strategy == PatternStrategy::heuristic && e.pattern->heuristic_name) {
      const HeuristicFn* fn = registry.heuristic(*e.pattern->heuristic_name);
      if (fn == nullptr) {
        throw ScanError(0, "unregistered heuristic '" + *e.pattern->heuristic_name + "'");
      }
      for (std::size_t first = 0; first < n; ++first) {
        for (const auto& m : (*fn)(input, std::span<const Word>(words), first)) {
          if (m.last_word < first || m.last_word >= n || !(m.probability > 0)) continue;
          emitted.push_back({first, m.last_word, i, std::min(m.probability, 1.0)});
        }
      }
    }
  }

  std::sort(emitted.begin(), emitted.end(), [](const Emitted& a, const Emitted& b) {
    if (a.first_word != b.first_word) return a.first_word < b.first_word;
    if (a.last_word != b.last_word) return a.last_word < b.last_word;
    return a.element < b.element;
  });
  emitted.erase(std::unique(emitted.begin(), emitted.end(),
                            [](const Emitted& a, const Emitted& b) {
                              return a.first_word == b.first_word && a.last_word == b.last_word &&
                                     a.element == b.element;
                            }),
                emitted.end());

  std::vector<bool> covered(n, false);
  for (const auto& t : emitted) {
    for (std::size_t w = t.first_word; w <= t.last_word; ++w) covered[w] = true;
  }
  for (std::size_t w = 0; w < n; ++w) {
    if (!covered[w]) {
      const std::string slice(input.substr(words[w].start, words[w].end - words[w].start));
      throw ScanError(words[w].start,
                      "uncovered input at offset " + std::to_string(words[w].start) + ": '" + slice + "'");
    }
  }

  std::vector<std::vector<std::size_t>> starting_at(n);
  for (std::size_t id = 0; id < emitted.size(); ++id) {
    const Emitted& t = emitted[id];
    TokenCandidate tok;
    tok.id = id;
    tok.element = model.elements[t.element].name;
    tok.span = {words[t.first_word].start, words[t.last_word].end};
    tok.lexeme = std::string(input.substr(tok.span.start, tok.span.length()));
    tok.pos_prob = t.prob;
    graph.tokens.push_back(std::move(tok));
    starting_at[t.first_word].push_back(id);
    if (t.first_word == 0) graph.start_tokens.push_back(id);
    if (t.last_word == n - 1) graph.end_tokens.push_back(id);
  }
  for (std::size_t id = 0; id < emitted.size(); ++id) {
    const std::size_t next = emitted[id].last_word + 1;
    if (next >= n) continue;
    for (std::size_t b : starting_at[next]) graph.edges.emplace_back(id, b);
  }
  return graph;
}

LexicalAnalysisGraph scan(std::string_view input, const LanguageModel& model, const Lexicon& lexicon) {
  return scan(input, model, lexicon, Registry::with_builtins());
}

std::uint64_t count_sequences(const LexicalAnalysisGraph& graph) {
  const std::size_t n = graph.tokens.size();
  std::vector<std::vector<std::size_t>> out(n);
  std::vector<std::size_t> indegree(n, 0);
  for (const auto& [a, b] : graph.edges) {
    out[a].push_back(b);
    ++indegree[b];
  }
  std::vector<std::uint64_t> ways(n, 0);
  for (std::size_t s : graph.start_tokens) ways[s] = 1;

  std::vector<std::size_t> ready;
  for (std::size_t i = n; i-- > 0;) {
    if (indegree[i] == 0) ready.push_back(i);
  }
  std::size_t processed = 0;
  while (!ready.empty()) {
    std::size_t v = ready.back();
    ready.pop_back();
    ++processed;
    for (std::size_t w : out[v]) {
      if (__builtin_add_overflow(ways[w], ways[v], &ways[w])) {
        throw std::overflow_error("token sequence count exceeds 64 bits");
      }
      if (--indegree[w] == 0) ready.push_back(w);
    }
  }
  if (processed != n) throw std::invalid_argument("lexical graph has a cycle");

  std::uint64_t total = 0;
  for (std::size_t e : graph.end_tokens) {
    if (__builtin_add_overflow(total, ways[e], &total)) {
      throw std::overflow_error("token sequence count exceeds 64 bits");
    }
  }
  return total;
}

}  // namespace graphparse
