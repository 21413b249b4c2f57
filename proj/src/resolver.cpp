#include "graphparse/resolver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "graphparse/error.hpp"
#include "graphparse/scoring.hpp"

namespace graphparse {

std::string_view to_string(ReferenceKind kind) {
  switch (kind) {
    case ReferenceKind::anaphoric: return "anaphoric";
    case ReferenceKind::cataphoric: return "cataphoric";
    case ReferenceKind::recursive: return "recursive";
  }
  return "?";
}

std::string AbstractSyntaxGraph::canonical() const {
  std::string out = tree.canonical();
  for (const auto& r : references) {
    out += '|' + std::to_string(r.from) + '.' + r.member + "->";
    out += r.to ? std::to_string(*r.to) : std::string("unresolved");
  }
  return out;
}

double DistanceDecayScorer::score(const ReferenceContext& context) const {
  const ParseGraphCandidate& tree = *context.tree;
  double total = 0;
  std::size_t count = 0;
  for (const auto& inst : tree.instances) {
    if (!inst.token) continue;
    total += static_cast<double>(inst.span.length());
    ++count;
  }
  const double scale = count == 0 ? 0.0 : length_factor_ * total / static_cast<double>(count);
  const double distance = std::fabs(static_cast<double>(tree.at(context.referenced).span.start) -
                                    static_cast<double>(tree.at(context.symbol).span.start));
  if (scale <= 0) return 1.0;
  return std::pow(base_, distance / scale);
}

namespace {

const MemberDef& member_def(const ParseGraphCandidate& tree, const LanguageModel& model,
                            std::size_t reference, std::string_view member) {
  const ElementDef* def = model.find(tree.at(reference).element);
  const MemberDef* m = def ? def->find_member(member) : nullptr;
  if (m == nullptr || !m->reference) {
    throw ResolutionError("'" + std::string(member) + "' is not a reference member of instance " +
                          std::to_string(reference));
  }
  return *m;
}

// The instance or one of its same-span single-child descendants owns a
// reference, so it stands for a reference rather than a referent.
bool reference_derived(const ParseGraphCandidate& tree, std::size_t id) {
  for (std::size_t cur = id;;) {
    const ElementInstance& inst = tree.at(cur);
    if (!inst.pending_references.empty()) return true;
    if (inst.children.size() != 1 || tree.at(inst.children.front()).span != inst.span) return false;
    cur = inst.children.front();
  }
}

struct Pending {
  std::size_t owner;
  std::string member;
  std::vector<std::optional<std::size_t>> options;
};

std::vector<Pending> pending_options(const ParseGraphCandidate& tree, const LanguageModel& model) {
  std::vector<Pending> out;
  for (const auto& inst : tree.instances) {
    for (const auto& ref : inst.pending_references) {
      Pending p{inst.id, ref.member, {}};
      for (std::size_t c : referent_candidates(tree, model, inst.id, ref.member)) p.options.emplace_back(c);
      if (p.options.empty() || member_def(tree, model, inst.id, ref.member).allow_unresolved) {
        p.options.emplace_back(std::nullopt);
      }
      out.push_back(std::move(p));
    }
  }
  return out;
}

std::vector<std::size_t> ancestors(const ParseGraphCandidate& tree, std::size_t id) {
  std::vector<std::size_t> path;
  for (std::size_t cur = id; cur != npos; cur = tree.at(cur).parent) path.push_back(cur);
  return path;  // id first, root last
}

}  // namespace

std::vector<std::size_t> referent_candidates(const ParseGraphCandidate& tree, const LanguageModel& model,
                                             std::size_t reference, std::string_view member) {
  const std::string& target = member_def(tree, model, reference, member).target;
  auto compatible = [&](std::size_t id) { return is_variant_of(model, tree.at(id).element, target); };
  std::vector<std::size_t> out;
  for (const auto& inst : tree.instances) {
    if (!compatible(inst.id) || reference_derived(tree, inst.id)) continue;
    const std::size_t parent = inst.parent;
    if (parent != npos && tree.at(parent).span == inst.span && compatible(parent)) continue;
    out.push_back(inst.id);
  }
  return out;
}

std::uint64_t assignment_count(const ParseGraphCandidate& tree, const LanguageModel& model) {
  std::uint64_t total = 1;
  for (const auto& p : pending_options(tree, model)) {
    if (__builtin_mul_overflow(total, p.options.size(), &total)) {
      return std::numeric_limits<std::uint64_t>::max();
    }
  }
  return total;
}

ReferenceKind classify(const ElementInstance& reference, const ElementInstance& referent) {
  if (referent.span.contains(reference.span) || reference.span.contains(referent.span)) {
    return ReferenceKind::recursive;
  }
  if (referent.span.end <= reference.span.start) return ReferenceKind::anaphoric;
  if (referent.span.start >= reference.span.end) return ReferenceKind::cataphoric;
  throw ResolutionError("reference " + to_string(reference.span) + " and referent " +
                        to_string(referent.span) + " overlap without nesting");
}

ContextGraph context_graph(const ParseGraphCandidate& tree, std::size_t reference, std::size_t referent) {
  if (reference >= tree.instances.size() || referent >= tree.instances.size()) {
    throw ResolutionError("instances do not belong to this candidate");
  }
  const auto a = ancestors(tree, reference);
  const auto b = ancestors(tree, referent);
  // Walk down from the root while the spines agree.
  std::size_t shared = 0;
  while (shared < a.size() && shared < b.size() && a[a.size() - 1 - shared] == b[b.size() - 1 - shared]) {
    ++shared;
  }
  if (shared == 0) throw ResolutionError("instances do not share a root");
  ContextGraph g;
  g.root = a[a.size() - shared];
  for (std::size_t i = 0; i + shared <= a.size(); ++i) g.nodes.push_back(a[i]);
  for (std::size_t i = 0; i + shared < b.size(); ++i) g.nodes.push_back(b[i]);
  std::sort(g.nodes.begin(), g.nodes.end());
  g.nodes.erase(std::unique(g.nodes.begin(), g.nodes.end()), g.nodes.end());
  return g;
}

ReferenceMetrics reference_metrics(const ParseGraphCandidate& tree, std::size_t reference,
                                   std::size_t referent) {
  const ContextGraph g = context_graph(tree, reference, referent);
  ReferenceMetrics m;
  m.token_distance = static_cast<std::int64_t>(tree.at(referent).span.start) -
                     static_cast<std::int64_t>(tree.at(reference).span.start);
  m.tree_distance = g.nodes.size() - 1;
  m.kind = classify(tree.at(reference), tree.at(referent));
  return m;
}

std::vector<AbstractSyntaxGraph> resolve(const ParseGraphCandidate& tree, const LanguageModel& model,
                                         const ValuationAlgebra& algebra, const ReferenceScorer& scorer,
                                         const ResolveOptions& options) {
  const auto pending = pending_options(tree, model);
  const std::uint64_t total = assignment_count(tree, model);
  if (total > options.max_graphs) {
    throw ResolutionError("reference assignments (" + std::to_string(total) + ") exceed the cap of " +
                          std::to_string(options.max_graphs));
  }
  if (tree.score.algebra() != algebra.id()) {
    throw AlgebraError("tree is scored in '" + tree.score.algebra() + "', not '" +
                       std::string(algebra.id()) + "'");
  }

  std::vector<AbstractSyntaxGraph> graphs;
  std::vector<std::size_t> choice(pending.size(), 0);
  while (true) {
    AbstractSyntaxGraph g;
    g.tree = tree;
    double weight = tree.score.weight();
    for (std::size_t r = 0; r < pending.size(); ++r) {
      const Pending& p = pending[r];
      ReferenceEdge edge;
      edge.from = p.owner;
      edge.member = p.member;
      edge.to = p.options[choice[r]];
      double value;
      if (edge.to) {
        edge.kind = classify(tree.at(p.owner), tree.at(*edge.to));
        const ContextGraph cg = context_graph(tree, p.owner, *edge.to);
        ReferenceContext ctx{&g, &g.tree, p.owner, p.member, *edge.to, &cg};
        value = scorer.score(ctx);
      } else {
        value = scorer.unresolved(tree, p.owner);
      }
      edge.score = algebra.make(value);
      weight = algebra.combine_weights(weight, edge.score.weight());
      g.references.push_back(std::move(edge));
    }
    g.score = algebra.from_weight(weight);
    graphs.push_back(std::move(g));

    std::size_t r = pending.size();
    while (r > 0) {
      --r;
      if (++choice[r] < pending[r].options.size()) break;
      choice[r] = 0;
      if (r == 0) {
        r = npos;
        break;
      }
    }
    if (pending.empty() || r == npos) break;
  }
  return rank(std::move(graphs), algebra);
}

}  // namespace graphparse
