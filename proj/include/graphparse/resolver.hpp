#pragma once

// Binding reference members to element instances, turning parse trees into
// abstract syntax graphs.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "graphparse/algebra.hpp"
#include "graphparse/candidate.hpp"
#include "graphparse/model.hpp"

namespace graphparse {

// recursive: the referent contains the reference (or the reverse), i.e. one
// lies on the other's root path. Otherwise the referent precedes
// (anaphoric) or follows (cataphoric) the reference.
enum class ReferenceKind { anaphoric, cataphoric, recursive };
std::string_view to_string(ReferenceKind kind);

struct ReferenceEdge {
  std::size_t from = 0;  // instance owning the reference member
  std::string member;
  std::optional<std::size_t> to;  // empty when unresolved
  std::optional<ReferenceKind> kind;
  Score score;
  friend bool operator==(const ReferenceEdge&, const ReferenceEdge&) = default;
};

struct AbstractSyntaxGraph {
  ParseGraphCandidate tree;
  std::vector<ReferenceEdge> references;
  Score score;

  std::string canonical() const;
  friend bool operator==(const AbstractSyntaxGraph&, const AbstractSyntaxGraph&) = default;
};

// Smallest connected piece of the tree holding both endpoints: the path
// between them, rooted at their lowest common ancestor.
struct ContextGraph {
  std::size_t root = 0;
  std::vector<std::size_t> nodes;  // ascending ids
  friend bool operator==(const ContextGraph&, const ContextGraph&) = default;
};

struct ReferenceContext {
  const AbstractSyntaxGraph* syntax_graph = nullptr;
  const ParseGraphCandidate* tree = nullptr;
  std::size_t symbol = 0;      // instance owning the reference
  std::string_view member;
  std::size_t referenced = 0;  // candidate referent
  const ContextGraph* context_graph = nullptr;
};

class ReferenceScorer {
 public:
  virtual ~ReferenceScorer() = default;
  // Linear value in [0, 1].
  virtual double score(const ReferenceContext& context) const = 0;
  virtual double unresolved(const ParseGraphCandidate& tree, std::size_t reference) const = 0;
};

// 0.5^(|d| / D) where d is the character distance between reference and
// referent starts and D five times the mean token length of the tree.
// Unbound references score a flat 0.1.
class DistanceDecayScorer final : public ReferenceScorer {
 public:
  DistanceDecayScorer(double base = 0.5, double length_factor = 5.0, double penalty = 0.1)
      : base_(base), length_factor_(length_factor), penalty_(penalty) {}
  double score(const ReferenceContext& context) const override;
  double unresolved(const ParseGraphCandidate&, std::size_t) const override { return penalty_; }

 private:
  double base_;
  double length_factor_;
  double penalty_;
};

struct ResolveOptions {
  std::size_t max_graphs = 10000;
};

// Type-compatible referents for one reference: instances of the member's
// target (or its variants), taking the outermost instance of each unit
// chain and skipping chains built on a reference form.
std::vector<std::size_t> referent_candidates(const ParseGraphCandidate& tree,
                                             const LanguageModel& model, std::size_t reference,
                                             std::string_view member);

// One graph per assignment of every pending reference, best first. Throws
// ResolutionError when the assignment space exceeds options.max_graphs.
std::vector<AbstractSyntaxGraph> resolve(const ParseGraphCandidate& tree,
                                         const LanguageModel& model,
                                         const ValuationAlgebra& algebra,
                                         const ReferenceScorer& scorer,
                                         const ResolveOptions& options = {});

// Number of graphs resolve() will produce, without building them.
std::uint64_t assignment_count(const ParseGraphCandidate& tree, const LanguageModel& model);

ReferenceKind classify(const ElementInstance& reference, const ElementInstance& referent);

ContextGraph context_graph(const ParseGraphCandidate& tree, std::size_t reference,
                           std::size_t referent);

struct ReferenceMetrics {
  std::int64_t token_distance = 0;  // referent.start - reference.start, characters
  std::size_t tree_distance = 0;    // edges on the path through the common ancestor
  ReferenceKind kind = ReferenceKind::anaphoric;
};

ReferenceMetrics reference_metrics(const ParseGraphCandidate& tree, std::size_t reference,
                                   std::size_t referent);

}  // namespace graphparse
