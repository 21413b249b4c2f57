#include "graphparse/pipeline.hpp"

#include "graphparse/error.hpp"

namespace graphparse {

Pipeline::Pipeline(LanguageModel model, Lexicon lexicon, Registry registry, AlgebraRegistry algebras)
    : model_(std::move(model)),
      lexicon_(std::move(lexicon)),
      registry_(std::move(registry)),
      algebras_(std::move(algebras)),
      grammar_(compile_grammar(model_, registry_)) {}

LexicalAnalysisGraph Pipeline::scan(std::string_view input) const {
  return graphparse::scan(input, model_, lexicon_, registry_);
}

ParseForest Pipeline::parse(const LexicalAnalysisGraph& graph) const {
  return graphparse::parse(graph, grammar_, registry_);
}

Analysis Pipeline::analyze(const ParseForest& forest, std::size_t k, const PipelineOptions& options) const {
  if (k == 0) throw std::invalid_argument("k must be at least 1");
  const ValuationAlgebra& algebra = algebras_.get(options.algebra);
  auto scorer = registry_.reference_scorer(options.scorer);
  if (!scorer) throw RegistryError("unregistered reference scorer '" + options.scorer + "'");

  Analysis out;
  out.tree_count = forest.tree_count();
  TreeEnumerator trees(forest, algebra, registry_, algebras_);
  std::vector<AbstractSyntaxGraph> pool;
  // Reference scores never exceed the identity, so a tree can only lose
  // value once resolved: stop when the next tree cannot reach the k-th
  // graph found so far. The small slack absorbs summation-order rounding.
  constexpr double kSlack = 1e-9;
  // Bounds how many tied trees are pulled past the first k.
  constexpr std::size_t kTieSlack = 4096;
  while (auto tree = trees.next()) {
    if (pool.size() >= k) {
      if (out.trees_examined >= k + kTieSlack) break;
      pool = rank(std::move(pool), algebra);
      pool.resize(k);
      const double kth = pool.back().score.weight();
      const double next = tree->score.weight();
      if (algebra.better_weight(kth, next + kSlack)) break;
    }
    ++out.trees_examined;
    for (auto& g : resolve(*tree, grammar_.model(), algebra, *scorer, options.resolve)) {
      pool.push_back(std::move(g));
    }
  }
  pool = rank(std::move(pool), algebra);
  if (pool.size() > k) pool.resize(k);
  for (auto& g : pool) {
    out.breakdowns.push_back(graph_score(g, grammar_.model(), algebra, registry_, algebras_));
  }
  out.graphs = std::move(pool);
  return out;
}

Analysis Pipeline::analyze(std::string_view input, std::size_t k, const PipelineOptions& options) const {
  return analyze(parse(scan(input)), k, options);
}

}  // namespace graphparse
