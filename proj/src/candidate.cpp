#include "graphparse/candidate.hpp"

#include <set>
#include <stdexcept>

#include "graphparse/error.hpp"
#include "graphparse/scoring.hpp"

namespace graphparse {

std::size_t ParseGraphCandidate::depth(std::size_t id) const {
  std::size_t d = 0;
  for (std::size_t cur = at(id).parent; cur != npos; cur = at(cur).parent) ++d;
  return d;
}

InstanceView ParseGraphCandidate::view(std::size_t id) const {
  const ElementInstance& inst = at(id);
  const std::string_view input = text;
  auto child = [&](std::size_t c) {
    const ElementInstance& ci = instances[c];
    return ChildView{ci.element, ci.span, input.substr(ci.span.start, ci.span.length())};
  };
  InstanceView v;
  v.element = inst.element;
  v.span = inst.span;
  v.text = input.substr(inst.span.start, inst.span.length());
  for (const auto& m : inst.members) {
    MemberView mv{m.member, {}};
    for (std::size_t c : m.children) mv.children.push_back(child(c));
    v.members.push_back(std::move(mv));
  }
  if (inst.variant) v.variant = child(*inst.variant);
  return v;
}

namespace {

void write_canonical(const ParseGraphCandidate& tree, std::size_t id, std::string& out) {
  const ElementInstance& inst = tree.at(id);
  out += inst.element;
  out += '@' + std::to_string(inst.span.start) + '-' + std::to_string(inst.span.end);
  if (inst.token) {
    out += '"' + inst.token->lexeme + '"';
    return;
  }
  if (inst.variant) {
    out += '<';
    write_canonical(tree, *inst.variant, out);
    out += '>';
    return;
  }
  out += '{';
  for (const auto& m : inst.members) {
    out += m.member + ':';
    for (std::size_t c : m.children) {
      write_canonical(tree, c, out);
      out += ' ';
    }
    out += ';';
  }
  out += '}';
}

}  // namespace

std::string ParseGraphCandidate::canonical() const {
  std::string out;
  if (!instances.empty()) write_canonical(*this, root, out);
  return out;
}

struct TreeEnumerator::State {
  struct Entry {
    double weight;
    std::size_t derivation;
    std::vector<std::size_t> ranks;
  };
  struct Order {
    const ValuationAlgebra* algebra;
    bool operator()(const Entry& a, const Entry& b) const {
      if (algebra->better_weight(a.weight, b.weight)) return true;
      if (algebra->better_weight(b.weight, a.weight)) return false;
      if (a.derivation != b.derivation) return a.derivation < b.derivation;
      return a.ranks < b.ranks;
    }
  };
  struct NodeState {
    bool started = false;
    std::vector<Entry> best;
    std::set<Entry, Order> frontier;
    std::set<std::pair<std::size_t, std::vector<std::size_t>>> seen;
  };

  const ParseForest& forest;
  const ValuationAlgebra& algebra;
  const Registry& registry;
  const AlgebraRegistry& algebras;
  std::vector<std::vector<double>> local;  // per node, per derivation
  std::vector<NodeState> nodes;
  std::size_t emitted = 0;

  State(const ParseForest& f, const ValuationAlgebra& a, const Registry& r, const AlgebraRegistry& al)
      : forest(f), algebra(a), registry(r), algebras(al) {
    const auto& fnodes = forest.nodes();
    local.resize(fnodes.size());
    nodes.resize(fnodes.size(), NodeState{false, {}, std::set<Entry, Order>(Order{&algebra}), {}});
    for (const auto& node : fnodes) {
      const ElementDef& def = forest.grammar().element(node.element);
      for (std::size_t d = 0; d < node.derivations.size(); ++d) {
        EvaluationContext ctx;
        ctx.forest = &forest;
        ctx.node = node.id;
        double w = element_score(def, forest.view(node.id, d), ctx, algebra, registry, algebras).weight();
        const std::size_t token = node.derivations[d].token;
        if (token != npos) {
          w = algebra.combine_weights(w, algebra.make(forest.graph().tokens[token].pos_prob).weight());
        }
        local[node.id].push_back(w);
      }
    }
  }

  std::optional<double> weight_of(std::size_t v, std::size_t d, const std::vector<std::size_t>& ranks) {
    const auto& children = forest.node(v).derivations[d].children;
    double w = local[v][d];
    for (std::size_t j = 0; j < children.size(); ++j) {
      if (!ensure(children[j].node, ranks[j])) return std::nullopt;
      w = algebra.combine_weights(w, nodes[children[j].node].best[ranks[j]].weight);
    }
    return w;
  }

  void offer(std::size_t v, std::size_t d, std::vector<std::size_t> ranks) {
    NodeState& ns = nodes[v];
    if (!ns.seen.emplace(d, ranks).second) return;
    if (auto w = weight_of(v, d, ranks)) nodes[v].frontier.insert({*w, d, std::move(ranks)});
  }

  // True when node v has at least i + 1 ranked subtrees.
  bool ensure(std::size_t v, std::size_t i) {
    if (!nodes[v].started) {
      nodes[v].started = true;
      const auto& derivations = forest.node(v).derivations;
      for (std::size_t d = 0; d < derivations.size(); ++d) {
        offer(v, d, std::vector<std::size_t>(derivations[d].children.size(), 0));
      }
    }
    while (nodes[v].best.size() <= i) {
      NodeState& ns = nodes[v];
      if (ns.frontier.empty()) return false;
      Entry top = *ns.frontier.begin();
      ns.frontier.erase(ns.frontier.begin());
      ns.best.push_back(top);
      for (std::size_t j = 0; j < top.ranks.size(); ++j) {
        std::vector<std::size_t> next = top.ranks;
        ++next[j];
        offer(v, top.derivation, std::move(next));
      }
    }
    return true;
  }

  std::size_t build(ParseGraphCandidate& tree, std::size_t v, std::size_t i, std::size_t parent) {
    const ForestNode& node = forest.node(v);
    const Entry& entry = nodes[v].best[i];
    const ForestDerivation& d = node.derivations[entry.derivation];
    const Grammar& grammar = forest.grammar();
    const std::size_t id = tree.instances.size();
    {
      ElementInstance inst;
      inst.id = id;
      inst.element = grammar.name(node.element);
      inst.span = node.span;
      inst.parent = parent;
      if (d.token != npos) inst.token = forest.graph().tokens[d.token];
      tree.instances.push_back(std::move(inst));
    }
    std::vector<std::size_t> child_ids;
    for (std::size_t j = 0; j < d.children.size(); ++j) {
      child_ids.push_back(build(tree, d.children[j].node, entry.ranks[j], id));
    }
    ElementInstance& inst = tree.instances[id];
    inst.children = child_ids;
    if (d.production != npos) {
      const Production& p = grammar.productions()[d.production];
      if (p.kind == ProductionKind::variant) {
        inst.variant = child_ids.front();
      } else {
        const ElementDef& def = grammar.element(node.element);
        for (std::size_t m = 0; m < def.members.size(); ++m) {
          MemberChildren mc{def.members[m].name, {}};
          for (std::size_t j = 0; j < d.children.size(); ++j) {
            const ChildLink& link = d.children[j];
            const Slot& s = link.floating ? p.floating[link.slot] : p.positional[link.slot];
            if (s.member != m) continue;
            mc.children.push_back(child_ids[j]);
            if (s.reference) inst.pending_references.push_back({def.members[m].name, child_ids[j]});
          }
          if (!mc.children.empty()) inst.members.push_back(std::move(mc));
        }
      }
    }
    return id;
  }
};

TreeEnumerator::TreeEnumerator(const ParseForest& forest, const ValuationAlgebra& algebra,
                               const Registry& registry, const AlgebraRegistry& algebras)
    : state_(std::make_unique<State>(forest, algebra, registry, algebras)) {}

TreeEnumerator::~TreeEnumerator() = default;
TreeEnumerator::TreeEnumerator(TreeEnumerator&&) noexcept = default;
TreeEnumerator& TreeEnumerator::operator=(TreeEnumerator&&) noexcept = default;

std::optional<ParseGraphCandidate> TreeEnumerator::next() {
  State& s = *state_;
  if (s.forest.roots().empty()) return std::nullopt;
  const std::size_t root = s.forest.roots().front();
  if (!s.ensure(root, s.emitted)) return std::nullopt;
  ParseGraphCandidate tree;
  tree.text = s.forest.graph().input;
  s.build(tree, root, s.emitted, npos);
  tree.root = 0;
  for (auto& inst : tree.instances) {
    EvaluationContext ctx;
    ctx.tree = &tree;
    ctx.instance = inst.id;
    const ElementDef& def = *s.forest.grammar().model().find(inst.element);
    inst.score = element_score(def, tree.view(inst.id), ctx, s.algebra, s.registry, s.algebras);
  }
  tree.score = graph_score(tree, s.forest.grammar().model(), s.algebra, s.registry, s.algebras).score;
  ++s.emitted;
  return tree;
}

std::vector<ParseGraphCandidate> enumerate_graphs(const ParseForest& forest, std::size_t k,
                                                  const ValuationAlgebra& algebra,
                                                  const Registry& registry,
                                                  const AlgebraRegistry& algebras) {
  if (k == 0) throw std::invalid_argument("k must be at least 1");
  // Trees tied with the k-th are pulled too (up to a bound) so the
  // canonical tie-break, not extraction order, decides who makes the cut.
  constexpr std::size_t kTieSlack = 4096;
  TreeEnumerator it(forest, algebra, registry, algebras);
  std::vector<ParseGraphCandidate> trees;
  while (auto t = it.next()) {
    if (trees.size() >= k) {
      const double kth = trees[k - 1].score.weight();
      if (algebra.better_weight(kth, t->score.weight()) || trees.size() >= k + kTieSlack) break;
    }
    trees.push_back(std::move(*t));
  }
  trees = rank(std::move(trees), algebra);
  if (trees.size() > k) trees.resize(k);
  return trees;
}

}  // namespace graphparse
