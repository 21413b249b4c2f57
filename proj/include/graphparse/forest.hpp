#pragma once

// Chart parsing of a lexical analysis graph into a shared packed parse
// forest.

#include <cstdint>
#include <string>
#include <vector>

#include "graphparse/grammar.hpp"
#include "graphparse/lexgraph.hpp"
#include "graphparse/registry.hpp"

namespace graphparse {

struct ChildLink {
  bool floating = false;
  std::size_t slot = 0;  // index into the production's positional or floating slots
  std::size_t node = 0;
  friend bool operator==(const ChildLink&, const ChildLink&) = default;
};

// One way of building a node: a production with its children in input
// order, or a single token for lexical nodes.
struct ForestDerivation {
  std::size_t production = npos;
  std::size_t token = npos;
  std::vector<ChildLink> children;
  friend bool operator==(const ForestDerivation&, const ForestDerivation&) = default;
};

struct ForestNode {
  std::size_t id = 0;
  std::size_t element = 0;
  Span span;
  std::size_t first_word = 0;  // chart columns are word indices
  std::size_t end_word = 0;
  std::vector<ForestDerivation> derivations;
};

class ParseForest {
 public:
  const std::vector<ForestNode>& nodes() const { return nodes_; }
  const ForestNode& node(std::size_t id) const { return nodes_[id]; }
  const std::vector<std::size_t>& roots() const { return roots_; }
  const Grammar& grammar() const { return *grammar_; }
  const LexicalAnalysisGraph& graph() const { return graph_; }

  InstanceView view(std::size_t node, std::size_t derivation) const;
  // Number of distinct trees below the roots, saturating at 2^64 - 1.
  std::uint64_t tree_count() const;
  std::uint64_t tree_count(std::size_t node) const;

 private:
  friend ParseForest parse(const LexicalAnalysisGraph&, const Grammar&, const Registry&);

  const Grammar* grammar_ = nullptr;
  LexicalAnalysisGraph graph_;
  std::vector<ForestNode> nodes_;
  std::vector<std::size_t> roots_;
};

// Earley-style recognition over the token DAG followed by bottom-up packing.
// Element constraints prune individual derivations as nodes complete.
// Throws ParseError("nothing to parse") for an empty graph and
// ParseError("no parse") when no start-element node spans the input. The
// grammar must outlive the returned forest.
ParseForest parse(const LexicalAnalysisGraph& graph, const Grammar& grammar,
                  const Registry& registry);

// Conjunction of the element's constraint specs.
bool check_constraints(const ElementDef& element, const InstanceView& instance,
                       const EvaluationContext& context, const Registry& registry);

}  // namespace graphparse
