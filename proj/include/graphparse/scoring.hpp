#pragma once

// Element and graph scores: the product of instance probabilities, the
// optional-member presence estimate and best-first ranking.

#include <algorithm>
#include <string_view>
#include <vector>

#include "graphparse/algebra.hpp"
#include "graphparse/candidate.hpp"
#include "graphparse/error.hpp"
#include "graphparse/model.hpp"
#include "graphparse/registry.hpp"
#include "graphparse/resolver.hpp"

namespace graphparse {

// Presence probability used for optional members the model leaves
// unannotated.
inline constexpr double kDefaultPresence = 0.5;

// value mode: P(E) * prod_{present optional} P(M|E) * prod_{absent optional} (1 - P(M|E)),
// each factor combined in `algebra`. evaluator mode: the registered
// evaluator, cast into `algebra`. default mode: identity. Frequency specs
// must already be normalised by compile_grammar.
Score element_score(const ElementDef& element, const InstanceView& instance,
                    const EvaluationContext& context, const ValuationAlgebra& algebra,
                    const Registry& registry, const AlgebraRegistry& algebras);

enum class FactorKind { instance, token, reference };
std::string_view to_string(FactorKind kind);

struct Factor {
  FactorKind kind = FactorKind::instance;
  std::size_t id = 0;
  double value = 1.0;  // linear
  friend bool operator==(const Factor&, const Factor&) = default;
};

struct ScoreBreakdown {
  Score score;
  std::vector<Factor> factors;
};

// Combination of every element score, every token's P(E|w) and, for syntax
// graphs, every reference edge score.
ScoreBreakdown graph_score(const ParseGraphCandidate& tree, const LanguageModel& model,
                           const ValuationAlgebra& algebra, const Registry& registry,
                           const AlgebraRegistry& algebras);
ScoreBreakdown graph_score(const AbstractSyntaxGraph& graph, const LanguageModel& model,
                           const ValuationAlgebra& algebra, const Registry& registry,
                           const AlgebraRegistry& algebras);

// Best first by algebra order; ties by canonical form, smallest first.
// Throws AlgebraError if a candidate is scored in another algebra.
template <typename Candidate>
std::vector<Candidate> rank(std::vector<Candidate> candidates, const ValuationAlgebra& algebra) {
  struct Keyed {
    std::string key;
    Candidate value;
  };
  std::vector<Keyed> keyed;
  keyed.reserve(candidates.size());
  for (auto& c : candidates) {
    if (c.score.algebra() != algebra.id()) {
      throw AlgebraError("cannot rank a '" + c.score.algebra() + "' score under '" +
                         std::string(algebra.id()) + "'");
    }
    std::string key = c.canonical();
    keyed.push_back({std::move(key), std::move(c)});
  }
  std::stable_sort(keyed.begin(), keyed.end(), [&](const Keyed& a, const Keyed& b) {
    if (algebra.better_weight(a.value.score.weight(), b.value.score.weight())) return true;
    if (algebra.better_weight(b.value.score.weight(), a.value.score.weight())) return false;
    return a.key < b.key;
  });
  std::vector<Candidate> out;
  out.reserve(keyed.size());
  for (auto& k : keyed) out.push_back(std::move(k.value));
  return out;
}

}  // namespace graphparse
