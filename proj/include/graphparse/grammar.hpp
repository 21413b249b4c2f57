#pragma once

// Compiled form of a LanguageModel consumed by the parse engine.

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "graphparse/model.hpp"
#include "graphparse/registry.hpp"

namespace graphparse {

inline constexpr std::size_t npos = static_cast<std::size_t>(-1);

struct Slot {
  std::size_t member = npos;  // index into ElementDef::members, npos for variant slots
  std::size_t symbol = npos;  // element index accepted in this slot
  bool many = false;
  std::size_t need = 1;  // minimum number of children
  bool reference = false;

  bool skippable() const { return need == 0; }
  // Counts above this value are indistinguishable for acceptance.
  std::size_t cap() const { return need > 1 ? need : 1; }
  friend bool operator==(const Slot&, const Slot&) = default;
};

enum class ProductionKind { composition, variant };

// Positional slots match the input in declared order; floating slots may be
// filled at any gap between (or around) positional children.
struct Production {
  std::size_t lhs = npos;
  ProductionKind kind = ProductionKind::composition;
  std::vector<Slot> positional;
  std::vector<Slot> floating;
  friend bool operator==(const Production&, const Production&) = default;
};

inline constexpr std::size_t kMaxFloatingSlots = 16;

// Progress through one production: `dot` is the positional slot currently
// being filled, `count` how many children it holds (capped), `floating` the
// capped fill count of every floating slot, four bits each.
struct SlotState {
  std::uint32_t dot = 0;
  std::uint32_t count = 0;
  std::uint64_t floating = 0;

  std::size_t floating_count(std::size_t slot) const {
    return static_cast<std::size_t>((floating >> (4 * slot)) & 0xF);
  }
  friend bool operator==(const SlotState&, const SlotState&) = default;
};

struct Move {
  bool floating = false;
  std::size_t slot = 0;  // index into positional or floating
  SlotState next;
};

// Every way to consume one more child from `state`. Each child sequence
// corresponds to exactly one path of moves.
std::vector<Move> next_moves(const Production& production, const SlotState& state);
bool can_finish(const Production& production, const SlotState& state);

class Grammar {
 public:
  // Model with frequency-mode specs normalised to value mode.
  const LanguageModel& model() const { return model_; }
  const std::vector<Production>& productions() const { return productions_; }
  std::span<const std::size_t> productions_of(std::size_t element) const {
    return by_lhs_[element];
  }
  std::size_t element_count() const { return model_.elements.size(); }
  const ElementDef& element(std::size_t index) const { return model_.elements[index]; }
  const std::string& name(std::size_t index) const { return model_.elements[index].name; }
  bool is_lexical(std::size_t index) const {
    return model_.elements[index].kind == ElementKind::lexical;
  }
  const std::vector<std::size_t>& lexical_elements() const { return lexical_; }
  std::size_t start() const { return start_; }
  // Position in an order where every element comes after all elements it
  // can wrap without consuming extra input.
  std::size_t same_span_rank(std::size_t element) const { return same_span_rank_[element]; }

 private:
  friend Grammar compile_grammar(const LanguageModel&, const Registry&);

  LanguageModel model_;
  std::vector<Production> productions_;
  std::vector<std::vector<std::size_t>> by_lhs_;
  std::vector<std::size_t> lexical_;
  std::vector<std::size_t> same_span_rank_;
  std::size_t start_ = 0;
};

// Throws CompileError if validation reports errors or a constraint,
// evaluator or heuristic name is not registered.
Grammar compile_grammar(const LanguageModel& model, const Registry& registry);

}  // namespace graphparse
