#pragma once

// Named hooks referenced from model documents: constraints, probability
// evaluators, heuristic pattern matchers and reference scorers.

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "graphparse/span.hpp"

namespace graphparse {

class ParseForest;
struct ParseGraphCandidate;
struct AbstractSyntaxGraph;
struct ContextGraph;
class ReferenceScorer;

struct ChildView {
  std::string_view element;
  Span span;
  std::string_view text;
};

struct MemberView {
  std::string_view member;
  std::vector<ChildView> children;  // input order
};

// What a constraint or evaluator sees of an element instance: its own
// extent plus the element, extent and text of each direct child. The view
// is identical whether built from a packed forest derivation or from an
// unpacked tree, which keeps scores consistent between the two.
struct InstanceView {
  std::string_view element;
  Span span;
  std::string_view text;
  std::vector<MemberView> members;  // present members only, declaration order
  std::optional<ChildView> variant;  // alternatives only

  const std::vector<ChildView>* find(std::string_view member) const;
  bool has(std::string_view member) const { return find(member) != nullptr; }
};

// Context supplied to constraints and evaluators. Forest-time evaluation
// fills `forest`/`node`; tree-time evaluation fills `tree`/`instance`;
// reference scoring adds the referent and the context graph.
struct EvaluationContext {
  const ParseForest* forest = nullptr;
  std::size_t node = static_cast<std::size_t>(-1);
  const ParseGraphCandidate* tree = nullptr;
  std::size_t instance = static_cast<std::size_t>(-1);
  const AbstractSyntaxGraph* syntax_graph = nullptr;
  std::optional<std::size_t> referenced_instance;
  const ContextGraph* context_graph = nullptr;
};

// A custom evaluator's result, expressed in any registered algebra.
struct Valuation {
  double value = 1.0;
  std::string algebra = "probabilistic";
};

using ConstraintParams = std::map<std::string, std::string>;
using ConstraintFn = std::function<bool(const InstanceView&, const ConstraintParams&,
                                        const EvaluationContext&)>;
using EvaluatorFn = std::function<Valuation(const InstanceView&, const EvaluationContext&)>;

struct Word {
  std::size_t start;
  std::size_t end;
};
struct HeuristicMatch {
  std::size_t last_word;  // inclusive index into the word list
  double probability;
};
using HeuristicFn = std::function<std::vector<HeuristicMatch>(
    std::string_view input, std::span<const Word> words, std::size_t first_word)>;

// Registrations are write-once: adding a name twice throws RegistryError.
// Registered functions must be pure; a finished registry is shared
// read-only between parse sessions.
class Registry {
 public:
  // Shipped constraints (member_equals, requires_member, number_agreement,
  // precedes, conjunction_between), evaluators (constant, span_decay),
  // heuristics (capitalized, numeric) and the distance_decay scorer.
  static Registry with_builtins();

  void add_constraint(std::string name, ConstraintFn fn);
  void add_evaluator(std::string name, EvaluatorFn fn);
  void add_heuristic(std::string name, HeuristicFn fn);
  void add_reference_scorer(std::string name, std::shared_ptr<const ReferenceScorer> scorer);

  const ConstraintFn* constraint(std::string_view name) const;
  const EvaluatorFn* evaluator(std::string_view name) const;
  const HeuristicFn* heuristic(std::string_view name) const;
  std::shared_ptr<const ReferenceScorer> reference_scorer(std::string_view name) const;

  // Registers parametrised aliases of shipped constraints and evaluators:
  // {"constraints":[{"name","base","params"}], "evaluators":[...]}.
  void load_manifest(std::string_view json);

 private:
  std::map<std::string, ConstraintFn, std::less<>> constraints_;
  std::map<std::string, EvaluatorFn, std::less<>> evaluators_;
  std::map<std::string, HeuristicFn, std::less<>> heuristics_;
  std::map<std::string, std::shared_ptr<const ReferenceScorer>, std::less<>> scorers_;
};

}  // namespace graphparse
