#include <algorithm>
#include <limits>
#include <set>
#include <tuple>
#include <unordered_map>
#include <unordered_set>

#include "graphparse/error.hpp"
#include "graphparse/forest.hpp"

namespace graphparse {

namespace {

struct Item {
  std::size_t production;
  SlotState state;
  std::size_t origin;
  friend bool operator==(const Item&, const Item&) = default;
};

struct ItemHash {
  std::size_t operator()(const Item& i) const {
    std::size_t h = i.production;
    h = h * 1000003u ^ i.state.dot;
    h = h * 1000003u ^ i.state.count;
    h = h * 1000003u ^ std::hash<std::uint64_t>{}(i.state.floating);
    h = h * 1000003u ^ i.origin;
    return h;
  }
};

struct Column {
  std::vector<Item> items;
  std::unordered_set<Item, ItemHash> seen;
  // Items advanced once `symbol` completes from this column.
  std::unordered_map<std::size_t, std::vector<Item>> waiting;
  std::set<std::size_t> predicted;
  std::set<std::size_t> expected_lexical;

  bool add(const Item& item) {
    if (!seen.insert(item).second) return false;
    items.push_back(item);
    return true;
  }
};

const Slot& slot_of(const Production& p, const Move& m) {
  return m.floating ? p.floating[m.slot] : p.positional[m.slot];
}

struct TokenIndex {
  std::vector<std::size_t> element;  // per token
  std::vector<std::size_t> first_word;
  std::vector<std::size_t> end_word;
  // (element, first word) -> tokens
  std::map<std::pair<std::size_t, std::size_t>, std::vector<std::size_t>> by_start;
};

TokenIndex index_tokens(const LexicalAnalysisGraph& graph, const Grammar& grammar) {
  TokenIndex idx;
  std::map<std::size_t, std::size_t> word_at_start, word_at_end;
  for (std::size_t w = 0; w < graph.words.size(); ++w) {
    word_at_start[graph.words[w].start] = w;
    word_at_end[graph.words[w].end] = w;
  }
  for (const auto& t : graph.tokens) {
    auto e = grammar.model().index_of(t.element);
    auto s = word_at_start.find(t.span.start);
    auto f = word_at_end.find(t.span.end);
    if (!e || !grammar.is_lexical(*e) || s == word_at_start.end() || f == word_at_end.end()) {
      throw ParseError(t.span.start, {}, "token " + std::to_string(t.id) + " does not fit the grammar");
    }
    idx.element.push_back(*e);
    idx.first_word.push_back(s->second);
    idx.end_word.push_back(f->second + 1);
    idx.by_start[{*e, s->second}].push_back(t.id);
  }
  return idx;
}

using Triple = std::tuple<std::size_t, std::size_t, std::size_t>;  // symbol, from, to

// Constraint-free recognition. Returns the completed non-lexical triples.
std::vector<Triple> recognise(const Grammar& grammar, const TokenIndex& tokens, std::size_t n) {
  std::vector<Column> chart(n + 1);
  std::set<Triple> completed;
  const auto& productions = grammar.productions();

  auto predict = [&](std::size_t symbol, std::size_t col) {
    if (!chart[col].predicted.insert(symbol).second) return;
    for (std::size_t p : grammar.productions_of(symbol)) chart[col].add({p, SlotState{}, col});
  };
  predict(grammar.start(), 0);

  for (std::size_t col = 0; col <= n; ++col) {
    for (std::size_t k = 0; k < chart[col].items.size(); ++k) {
      const Item item = chart[col].items[k];
      const Production& p = productions[item.production];
      if (can_finish(p, item.state) && item.origin < col) {
        if (completed.insert({p.lhs, item.origin, col}).second) {
          auto it = chart[item.origin].waiting.find(p.lhs);
          if (it != chart[item.origin].waiting.end()) {
            for (const Item& next : it->second) chart[col].add(next);
          }
        }
      }
      for (const Move& m : next_moves(p, item.state)) {
        const std::size_t y = slot_of(p, m).symbol;
        const Item next{item.production, m.next, item.origin};
        if (grammar.is_lexical(y)) {
          chart[col].expected_lexical.insert(y);
          auto it = tokens.by_start.find({y, col});
          if (it == tokens.by_start.end()) continue;
          for (std::size_t t : it->second) chart[tokens.end_word[t]].add(next);
        } else {
          chart[col].waiting[y].push_back(next);
          predict(y, col);
        }
      }
    }
  }
  return {completed.begin(), completed.end()};
}

std::uint64_t saturating_add(std::uint64_t a, std::uint64_t b) {
  std::uint64_t r;
  return __builtin_add_overflow(a, b, &r) ? std::numeric_limits<std::uint64_t>::max() : r;
}

std::uint64_t saturating_mul(std::uint64_t a, std::uint64_t b) {
  std::uint64_t r;
  return __builtin_mul_overflow(a, b, &r) ? std::numeric_limits<std::uint64_t>::max() : r;
}

}  // namespace

bool check_constraints(const ElementDef& element, const InstanceView& instance,
                       const EvaluationContext& context, const Registry& registry) {
  for (const auto& spec : element.constraints) {
    const ConstraintFn* fn = registry.constraint(spec.name);
    if (fn == nullptr) throw RegistryError("unregistered constraint '" + spec.name + "'");
    if (!(*fn)(instance, spec.params, context)) return false;
  }
  return true;
}

InstanceView ParseForest::view(std::size_t node_id, std::size_t derivation) const {
  const ForestNode& n = nodes_.at(node_id);
  const ForestDerivation& d = n.derivations.at(derivation);
  const std::string_view input = graph_.input;
  InstanceView v;
  v.element = grammar_->name(n.element);
  v.span = n.span;
  v.text = input.substr(n.span.start, n.span.length());
  if (d.production == npos) return v;
  const Production& p = grammar_->productions()[d.production];
  auto child = [&](std::size_t id) {
    const ForestNode& c = nodes_[id];
    return ChildView{grammar_->name(c.element), c.span, input.substr(c.span.start, c.span.length())};
  };
  if (p.kind == ProductionKind::variant) {
    v.variant = child(d.children.front().node);
    return v;
  }
  const ElementDef& def = grammar_->element(n.element);
  for (std::size_t m = 0; m < def.members.size(); ++m) {
    MemberView mv{def.members[m].name, {}};
    for (const auto& link : d.children) {
      const Slot& s = link.floating ? p.floating[link.slot] : p.positional[link.slot];
      if (s.member == m) mv.children.push_back(child(link.node));
    }
    if (!mv.children.empty()) v.members.push_back(std::move(mv));
  }
  return v;
}

std::uint64_t ParseForest::tree_count(std::size_t node_id) const {
  std::vector<std::uint64_t> count(nodes_.size(), 0);
  for (std::size_t i = 0; i <= node_id; ++i) {
    std::uint64_t total = 0;
    for (const auto& d : nodes_[i].derivations) {
      std::uint64_t product = 1;
      for (const auto& c : d.children) product = saturating_mul(product, count[c.node]);
      total = saturating_add(total, product);
    }
    count[i] = total;
  }
  return count[node_id];
}

std::uint64_t ParseForest::tree_count() const {
  std::uint64_t total = 0;
  for (std::size_t r : roots_) total = saturating_add(total, tree_count(r));
  return total;
}

ParseForest parse(const LexicalAnalysisGraph& graph, const Grammar& grammar, const Registry& registry) {
  if (graph.tokens.empty() || graph.words.empty()) {
    throw ParseError(0, {}, "nothing to parse");
  }
  ParseForest forest;
  forest.grammar_ = &grammar;
  forest.graph_ = graph;
  const std::size_t n = graph.words.size();
  const TokenIndex tokens = index_tokens(forest.graph_, grammar);
  const auto& productions = grammar.productions();
  const auto& words = forest.graph_.words;
  auto span_of = [&](std::size_t from, std::size_t to) { return Span{words[from].start, words[to - 1].end}; };

  // Nodes by (symbol, first word).
  std::unordered_map<std::size_t, std::vector<std::size_t>> starting;
  auto key = [&](std::size_t symbol, std::size_t col) { return symbol * (n + 1) + col; };
  auto& nodes = forest.nodes_;

  auto accept = [&](ForestNode node) {
    node.id = nodes.size();
    starting[key(node.element, node.first_word)].push_back(node.id);
    nodes.push_back(std::move(node));
  };

  for (std::size_t t = 0; t < forest.graph_.tokens.size(); ++t) {
    ForestNode node;
    node.element = tokens.element[t];
    node.first_word = tokens.first_word[t];
    node.end_word = tokens.end_word[t];
    node.span = forest.graph_.tokens[t].span;
    node.derivations.push_back({npos, t, {}});
    nodes.push_back(node);  // provisional, checked below
    nodes.back().id = nodes.size() - 1;
    EvaluationContext ctx;
    ctx.forest = &forest;
    ctx.node = nodes.back().id;
    const bool ok = check_constraints(grammar.element(node.element), forest.view(ctx.node, 0), ctx, registry);
    nodes.pop_back();
    if (ok) accept(std::move(node));
  }

  auto triples = recognise(grammar, tokens, n);
  std::sort(triples.begin(), triples.end(), [&](const Triple& a, const Triple& b) {
    const auto [sa, ia, ja] = a;
    const auto [sb, ib, jb] = b;
    if (ja - ia != jb - ib) return ja - ia < jb - ib;
    if (grammar.same_span_rank(sa) != grammar.same_span_rank(sb)) {
      return grammar.same_span_rank(sa) < grammar.same_span_rank(sb);
    }
    return std::tie(ia, sa) < std::tie(ib, sb);
  });

  for (const auto& [symbol, from, to] : triples) {
    ForestNode node;
    node.element = symbol;
    node.first_word = from;
    node.end_word = to;
    node.span = span_of(from, to);
    const ElementDef& def = grammar.element(symbol);

    for (std::size_t pid : grammar.productions_of(symbol)) {
      const Production& p = productions[pid];
      std::vector<ChildLink> children;
      std::unordered_set<Item, ItemHash> dead;  // origin field holds the column
      std::vector<ForestDerivation> found;

      auto dfs = [&](auto&& self, std::size_t col, const SlotState& state) -> bool {
        if (col == to) {
          if (!can_finish(p, state)) return false;
          found.push_back({pid, npos, children});
          return true;
        }
        const Item memo{pid, state, col};
        if (dead.contains(memo)) return false;
        bool any = false;
        for (const Move& m : next_moves(p, state)) {
          auto it = starting.find(key(slot_of(p, m).symbol, col));
          if (it == starting.end()) continue;
          for (std::size_t child : it->second) {
            const ForestNode& c = nodes[child];
            if (c.end_word > to) continue;
            children.push_back({m.floating, m.slot, child});
            any = self(self, c.end_word, m.next) || any;
            children.pop_back();
          }
        }
        if (!any) dead.insert(memo);
        return any;
      };
      dfs(dfs, from, SlotState{});

      for (auto& d : found) {
        nodes.push_back(node);
        nodes.back().id = nodes.size() - 1;
        nodes.back().derivations = {d};
        EvaluationContext ctx;
        ctx.forest = &forest;
        ctx.node = nodes.back().id;
        const bool ok = check_constraints(def, forest.view(ctx.node, 0), ctx, registry);
        nodes.pop_back();
        if (ok) node.derivations.push_back(std::move(d));
      }
    }
    if (!node.derivations.empty()) accept(std::move(node));
  }

  std::optional<std::size_t> root;
  if (auto it = starting.find(key(grammar.start(), 0)); it != starting.end()) {
    for (std::size_t id : it->second) {
      if (nodes[id].end_word == n) root = id;
    }
  }

  if (!root) {
    // Furthest column a viable prefix of the start element reaches, using
    // only nodes that survived their constraints.
    std::vector<Column> chart(n + 1);
    auto predict = [&](std::size_t symbol, std::size_t col) {
      if (!chart[col].predicted.insert(symbol).second) return;
      for (std::size_t p : grammar.productions_of(symbol)) chart[col].add({p, SlotState{}, col});
    };
    predict(grammar.start(), 0);
    std::size_t furthest = 0;
    for (std::size_t col = 0; col <= n; ++col) {
      if (!chart[col].items.empty() || !chart[col].predicted.empty()) furthest = col;
      for (std::size_t k = 0; k < chart[col].items.size(); ++k) {
        const Item item = chart[col].items[k];
        const Production& p = productions[item.production];
        for (const Move& m : next_moves(p, item.state)) {
          const std::size_t y = slot_of(p, m).symbol;
          if (grammar.is_lexical(y)) {
            chart[col].expected_lexical.insert(y);
          } else {
            predict(y, col);
          }
          auto it = starting.find(key(y, col));
          if (it == starting.end()) continue;
          for (std::size_t child : it->second) chart[nodes[child].end_word].add({item.production, m.next, item.origin});
        }
      }
    }
    std::vector<std::string> expected;
    for (std::size_t e : chart[furthest].expected_lexical) expected.push_back(grammar.name(e));
    const std::size_t offset = furthest == 0 ? words.front().start : words[furthest - 1].end;
    std::string message = "no parse: no analysis extends past offset " + std::to_string(offset);
    if (furthest == n) {
      message += " (the whole input is consumed but no complete analysis satisfies the model)";
    } else if (!expected.empty()) {
      message += "; expected one of:";
      for (const auto& e : expected) message += " " + e;
    }
    throw ParseError(offset, expected, message);
  }

  // Keep only nodes reachable from the root, renumbered in build order.
  std::vector<bool> keep(nodes.size(), false);
  std::vector<std::size_t> stack{*root};
  keep[*root] = true;
  while (!stack.empty()) {
    std::size_t id = stack.back();
    stack.pop_back();
    for (const auto& d : nodes[id].derivations) {
      for (const auto& c : d.children) {
        if (!keep[c.node]) {
          keep[c.node] = true;
          stack.push_back(c.node);
        }
      }
    }
  }
  std::vector<std::size_t> remap(nodes.size(), npos);
  std::vector<ForestNode> kept;
  for (std::size_t id = 0; id < nodes.size(); ++id) {
    if (!keep[id]) continue;
    remap[id] = kept.size();
    kept.push_back(std::move(nodes[id]));
    kept.back().id = remap[id];
  }
  for (auto& node : kept) {
    for (auto& d : node.derivations) {
      for (auto& c : d.children) c.node = remap[c.node];
    }
  }
  nodes = std::move(kept);
  forest.roots_ = {remap[*root]};
  return forest;
}

}  // namespace graphparse
