#include "graphparse/model.hpp"

#include <set>

namespace graphparse {

const MemberDef* ElementDef::find_member(std::string_view member) const {
  for (const auto& m : members) {
    if (m.name == member) return &m;
  }
  return nullptr;
}

const ElementDef* LanguageModel::find(std::string_view element) const {
  for (const auto& e : elements) {
    if (e.name == element) return &e;
  }
  return nullptr;
}

std::optional<std::size_t> LanguageModel::index_of(std::string_view element) const {
  for (std::size_t i = 0; i < elements.size(); ++i) {
    if (elements[i].name == element) return i;
  }
  return std::nullopt;
}

std::string_view to_string(ElementKind kind) {
  switch (kind) {
    case ElementKind::lexical: return "lexical";
    case ElementKind::composition: return "composition";
    case ElementKind::alternative: return "alternative";
  }
  return "?";
}

std::string_view to_string(PatternStrategy strategy) {
  switch (strategy) {
    case PatternStrategy::regex: return "regex";
    case PatternStrategy::lexicon: return "lexicon";
    case PatternStrategy::heuristic: return "heuristic";
  }
  return "?";
}

std::string_view to_string(ProbabilityMode mode) {
  switch (mode) {
    case ProbabilityMode::value: return "value";
    case ProbabilityMode::frequency: return "frequency";
    case ProbabilityMode::evaluator: return "evaluator";
    case ProbabilityMode::default_mode: return "default";
  }
  return "?";
}

std::string_view to_string(Severity severity) {
  switch (severity) {
    case Severity::error: return "ERROR";
    case Severity::warning: return "WARNING";
    case Severity::notice: return "NOTICE";
  }
  return "?";
}

bool has_errors(const std::vector<Diagnostic>& diagnostics) {
  for (const auto& d : diagnostics) {
    if (d.severity == Severity::error) return true;
  }
  return false;
}

bool is_variant_of(const LanguageModel& model, std::string_view element,
                   std::string_view target) {
  if (element == target) return true;
  std::set<std::string_view> seen;
  std::vector<std::string_view> stack{target};
  while (!stack.empty()) {
    std::string_view current = stack.back();
    stack.pop_back();
    if (!seen.insert(current).second) continue;
    const ElementDef* def = model.find(current);
    if (def == nullptr || def->kind != ElementKind::alternative) continue;
    for (const auto& v : def->variants) {
      if (v == element) return true;
      stack.push_back(v);
    }
  }
  return false;
}

}  // namespace graphparse
