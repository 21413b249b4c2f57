#include "graphparse/scoring.hpp"

namespace graphparse {

Score element_score(const ElementDef& element, const InstanceView& instance,
                    const EvaluationContext& context, const ValuationAlgebra& algebra,
                    const Registry& registry, const AlgebraRegistry& algebras) {
  const ProbabilitySpec& spec = element.probability;
  switch (spec.mode) {
    case ProbabilityMode::value: {
      double weight = algebra.make(spec.value.value_or(1.0)).weight();
      for (const auto& m : element.members) {
        if (!m.is_optional()) continue;
        auto it = spec.member_presence.find(m.name);
        const double presence = it == spec.member_presence.end() ? kDefaultPresence : it->second;
        const double factor = instance.has(m.name) ? presence : 1.0 - presence;
        weight = algebra.combine_weights(weight, algebra.make(factor).weight());
      }
      return algebra.from_weight(weight);
    }
    case ProbabilityMode::frequency:
      throw AlgebraError("element '" + element.name +
                         "' still carries a frequency; score elements of a compiled grammar's model");
    case ProbabilityMode::evaluator: {
      const std::string name = spec.evaluator.value_or("");
      const EvaluatorFn* fn = registry.evaluator(name);
      if (fn == nullptr) throw RegistryError("unregistered evaluator '" + name + "'");
      const Valuation v = (*fn)(instance, context);
      if (v.algebra == algebra.id()) return algebra.make(v.value);
      return cast(algebras.get(v.algebra).make(v.value), algebra, algebras);
    }
    case ProbabilityMode::default_mode:
      break;
  }
  return algebra.identity();
}

std::string_view to_string(FactorKind kind) {
  switch (kind) {
    case FactorKind::instance: return "instanceId";
    case FactorKind::token: return "tokenId";
    case FactorKind::reference: return "referenceId";
  }
  return "?";
}

ScoreBreakdown graph_score(const ParseGraphCandidate& tree, const LanguageModel& model,
                           const ValuationAlgebra& algebra, const Registry& registry,
                           const AlgebraRegistry& algebras) {
  ScoreBreakdown out;
  double weight = algebra.identity_weight();
  for (const auto& inst : tree.instances) {
    const ElementDef* def = model.find(inst.element);
    if (def == nullptr) throw AlgebraError("element '" + inst.element + "' is not in the model");
    EvaluationContext ctx;
    ctx.tree = &tree;
    ctx.instance = inst.id;
    const Score s = element_score(*def, tree.view(inst.id), ctx, algebra, registry, algebras);
    weight = algebra.combine_weights(weight, s.weight());
    out.factors.push_back({FactorKind::instance, inst.id, s.value()});
    if (inst.token) {
      const Score p = algebra.make(inst.token->pos_prob);
      weight = algebra.combine_weights(weight, p.weight());
      out.factors.push_back({FactorKind::token, inst.token->id, p.value()});
    }
  }
  out.score = algebra.from_weight(weight);
  return out;
}

ScoreBreakdown graph_score(const AbstractSyntaxGraph& graph, const LanguageModel& model,
                           const ValuationAlgebra& algebra, const Registry& registry,
                           const AlgebraRegistry& algebras) {
  ScoreBreakdown out = graph_score(graph.tree, model, algebra, registry, algebras);
  double weight = out.score.weight();
  for (std::size_t r = 0; r < graph.references.size(); ++r) {
    const Score s = cast(graph.references[r].score, algebra, algebras);
    weight = algebra.combine_weights(weight, s.weight());
    out.factors.push_back({FactorKind::reference, r, s.value()});
  }
  out.score = algebra.from_weight(weight);
  return out;
}

}  // namespace graphparse
