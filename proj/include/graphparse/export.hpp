#pragma once

// JSON, DOT and plain-text renderings of lexical graphs, forests, trees and
// syntax graphs.

#include <optional>
#include <string>
#include <vector>

#include "graphparse/forest.hpp"
#include "graphparse/lexgraph.hpp"
#include "graphparse/resolver.hpp"
#include "graphparse/scoring.hpp"

#include "json.hpp"

namespace graphparse {

nlohmann::ordered_json to_json(const LexicalAnalysisGraph& graph);
std::string to_dot(const LexicalAnalysisGraph& graph);
std::string to_text(const LexicalAnalysisGraph& graph);

nlohmann::ordered_json to_json(const ParseForest& forest);

// Nested tree {id, element, span, score, members, variant?, lexeme?}.
nlohmann::ordered_json tree_to_json(const ParseGraphCandidate& tree);

// {"algebra", "value", "factors"?}
nlohmann::ordered_json score_to_json(const ScoreBreakdown& breakdown, bool explain);

// Tree export plus "references" and an overall "score".
nlohmann::ordered_json to_json(const AbstractSyntaxGraph& graph,
                               const std::optional<ScoreBreakdown>& breakdown = std::nullopt,
                               bool explain = false);

std::string to_dot(const AbstractSyntaxGraph& graph, const std::string& name = "G");
std::string to_text(const AbstractSyntaxGraph& graph);

}  // namespace graphparse
