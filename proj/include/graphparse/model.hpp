#pragma once

// Declarative abstract syntax models: element kinds, members, patterns,
// constraints and probability annotations.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace graphparse {

enum class ElementKind { lexical, composition, alternative };

struct Multiplicity {
  bool many = false;
  std::int64_t min = 1;  // only meaningful when many

  static Multiplicity one() { return {}; }
  static Multiplicity at_least(std::int64_t n) { return {true, n}; }
  friend bool operator==(const Multiplicity&, const Multiplicity&) = default;
};

struct MemberDef {
  std::string name;
  std::string target;
  bool optional = false;
  bool floating = false;
  Multiplicity multiplicity;
  bool reference = false;
  // Lexical element accepted in place of the target when `reference` is set.
  std::string reference_form;
  // Whether resolution may leave the reference unbound even when
  // type-compatible referents exist.
  bool allow_unresolved = false;

  // Optional in the sense of OPT(E): may be absent from an instance.
  bool is_optional() const {
    return optional || (multiplicity.many && multiplicity.min == 0);
  }
  friend bool operator==(const MemberDef&, const MemberDef&) = default;
};

enum class PatternStrategy { regex, lexicon, heuristic };

struct PatternSpec {
  PatternStrategy strategy = PatternStrategy::regex;
  std::optional<std::string> expression;
  std::optional<std::string> lexicon_class;
  std::optional<std::string> heuristic_name;
  // Open word class: unknown lexemes fall back to a uniform distribution
  // over all open classes.
  bool open = false;
  friend bool operator==(const PatternSpec&, const PatternSpec&) = default;
};

struct ConstraintSpec {
  std::string name;
  std::map<std::string, std::string> params;
  friend bool operator==(const ConstraintSpec&, const ConstraintSpec&) = default;
};

enum class ProbabilityMode { value, frequency, evaluator, default_mode };

struct ProbabilitySpec {
  ProbabilityMode mode = ProbabilityMode::default_mode;
  std::optional<double> value;
  std::optional<std::int64_t> frequency;
  std::optional<std::string> evaluator;
  // P(M|E) for optional members, keyed by member name.
  std::map<std::string, double> member_presence;
  friend bool operator==(const ProbabilitySpec&, const ProbabilitySpec&) = default;
};

struct ElementDef {
  std::string name;
  ElementKind kind = ElementKind::composition;
  std::vector<MemberDef> members;
  std::vector<std::string> variants;
  std::optional<PatternSpec> pattern;
  std::vector<ConstraintSpec> constraints;
  ProbabilitySpec probability;

  const MemberDef* find_member(std::string_view member) const;
  friend bool operator==(const ElementDef&, const ElementDef&) = default;
};

struct LanguageModel {
  std::string name;
  std::string start;
  std::vector<ElementDef> elements;

  const ElementDef* find(std::string_view element) const;
  std::optional<std::size_t> index_of(std::string_view element) const;
  friend bool operator==(const LanguageModel&, const LanguageModel&) = default;
};

std::string_view to_string(ElementKind kind);
std::string_view to_string(PatternStrategy strategy);
std::string_view to_string(ProbabilityMode mode);

// Structural load of a model document; semantic checks live in
// validate_model. Throws ModelLoadError.
LanguageModel load_model(std::string_view document);
LanguageModel load_model_file(const std::string& path);

// Canonical JSON rendering. load_model(serialize_model(m)) == m.
std::string serialize_model(const LanguageModel& model);

enum class Severity { error, warning, notice };
std::string_view to_string(Severity severity);

struct Diagnostic {
  Severity severity;
  std::string path;
  std::string message;
  friend bool operator==(const Diagnostic&, const Diagnostic&) = default;
};

// Returns every invariant violation in element declaration order; never
// throws.
std::vector<Diagnostic> validate_model(const LanguageModel& model);
bool has_errors(const std::vector<Diagnostic>& diagnostics);

// True when `element` is `target` or reachable from it through alternative
// variants.
bool is_variant_of(const LanguageModel& model, std::string_view element,
                   std::string_view target);

}  // namespace graphparse
