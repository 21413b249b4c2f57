#pragma once

// scan -> parse -> enumerate -> resolve -> rank, wired together.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "graphparse/algebra.hpp"
#include "graphparse/candidate.hpp"
#include "graphparse/forest.hpp"
#include "graphparse/grammar.hpp"
#include "graphparse/lexgraph.hpp"
#include "graphparse/registry.hpp"
#include "graphparse/resolver.hpp"
#include "graphparse/scoring.hpp"

namespace graphparse {

struct PipelineOptions {
  std::string algebra = "probabilistic";
  std::string scorer = "distance_decay";
  ResolveOptions resolve;
};

struct Analysis {
  std::vector<AbstractSyntaxGraph> graphs;  // best first
  std::vector<ScoreBreakdown> breakdowns;   // parallel to graphs
  std::uint64_t tree_count = 0;
  std::size_t trees_examined = 0;
};

class Pipeline {
 public:
  // Validates and compiles the model; throws CompileError.
  Pipeline(LanguageModel model, Lexicon lexicon, Registry registry = Registry::with_builtins(),
           AlgebraRegistry algebras = AlgebraRegistry::with_builtins());

  const LanguageModel& model() const { return model_; }
  const Grammar& grammar() const { return grammar_; }
  const Lexicon& lexicon() const { return lexicon_; }
  const Registry& registry() const { return registry_; }
  const AlgebraRegistry& algebras() const { return algebras_; }

  LexicalAnalysisGraph scan(std::string_view input) const;
  ParseForest parse(const LexicalAnalysisGraph& graph) const;

  // The k best syntax graphs. Trees are pulled best first until the next
  // tree's score cannot beat the current k-th graph, which is exact because
  // reference scores never exceed the algebra identity.
  Analysis analyze(const ParseForest& forest, std::size_t k,
                   const PipelineOptions& options = {}) const;
  Analysis analyze(std::string_view input, std::size_t k,
                   const PipelineOptions& options = {}) const;

 private:
  LanguageModel model_;
  Lexicon lexicon_;
  Registry registry_;
  AlgebraRegistry algebras_;
  Grammar grammar_;
};

}  // namespace graphparse
