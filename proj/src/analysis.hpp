#pragma once

// Structural facts about a model shared by validation and compilation.

#include <cstddef>
#include <optional>
#include <vector>

#include "graphparse/model.hpp"

namespace graphparse::detail {

// Minimum number of children a member must contribute.
inline std::size_t member_need(const MemberDef& m) {
  if (m.is_optional()) return 0;
  if (m.multiplicity.many) return m.multiplicity.min > 1 ? static_cast<std::size_t>(m.multiplicity.min) : 1;
  return 1;
}

// Element accepted in the member's slot: the reference form for reference
// members, the target otherwise.
inline const std::string& slot_element(const MemberDef& m) {
  return m.reference ? m.reference_form : m.target;
}

// A composition whose members may all be absent matches empty input.
inline bool nullable(const ElementDef& e) {
  if (e.kind != ElementKind::composition) return false;
  for (const auto& m : e.members) {
    if (member_need(m) > 0) return false;
  }
  return true;
}

// edges[i] lists the elements that element i can wrap while covering
// exactly the same input (a single child with every other member absent).
// Unknown names are ignored.
std::vector<std::vector<std::size_t>> same_span_edges(const LanguageModel& model);

// Elements in an order where each comes after everything it can wrap at the
// same span, or nullopt if the relation has a cycle. `cyclic` receives the
// elements on cycles.
std::optional<std::vector<std::size_t>> same_span_order(const LanguageModel& model,
                                                        std::vector<std::size_t>* cyclic = nullptr);

}  // namespace graphparse::detail
