#include "graphparse/grammar.hpp"

#include <algorithm>
#include <map>

#include "analysis.hpp"
#include "graphparse/error.hpp"

namespace graphparse {

namespace {

std::uint64_t with_floating_count(std::uint64_t packed, std::size_t slot, std::size_t count) {
  const std::uint64_t mask = std::uint64_t{0xF} << (4 * slot);
  return (packed & ~mask) | (static_cast<std::uint64_t>(count) << (4 * slot));
}

std::size_t floating_cap(const Slot& s) { return std::min<std::size_t>(s.cap(), 15); }

// Frequency specs become value specs: freq / sum of the frequencies of the
// frequency-mode siblings under the single parent alternative.
void normalise_frequencies(LanguageModel& model) {
  std::map<std::string, double> normalised;
  for (const auto& alt : model.elements) {
    if (alt.kind != ElementKind::alternative) continue;
    double total = 0;
    for (const auto& v : alt.variants) {
      const ElementDef* e = model.find(v);
      if (e && e->probability.mode == ProbabilityMode::frequency) {
        total += static_cast<double>(e->probability.frequency.value_or(0));
      }
    }
    if (total <= 0) continue;
    for (const auto& v : alt.variants) {
      const ElementDef* e = model.find(v);
      if (e && e->probability.mode == ProbabilityMode::frequency) {
        normalised[v] = static_cast<double>(e->probability.frequency.value_or(0)) / total;
      }
    }
  }
  for (auto& e : model.elements) {
    auto it = normalised.find(e.name);
    if (it == normalised.end()) continue;
    e.probability.mode = ProbabilityMode::value;
    e.probability.value = it->second;
    e.probability.frequency.reset();
  }
}

}  // namespace

std::vector<Move> next_moves(const Production& p, const SlotState& state) {
  std::vector<Move> moves;
  const std::size_t n = p.positional.size();
  if (state.dot < n) {
    const Slot& current = p.positional[state.dot];
    if (state.count == 0 || current.many) {
      SlotState next = state;
      next.count = static_cast<std::uint32_t>(std::min<std::size_t>(state.count + 1, current.cap()));
      moves.push_back({false, state.dot, next});
    }
    if (state.count >= current.need) {
      for (std::size_t d = state.dot + 1; d < n; ++d) {
        SlotState next = state;
        next.dot = static_cast<std::uint32_t>(d);
        next.count = 1;
        moves.push_back({false, d, next});
        if (!p.positional[d].skippable()) break;
      }
    }
  }
  for (std::size_t f = 0; f < p.floating.size(); ++f) {
    const Slot& slot = p.floating[f];
    const std::size_t have = state.floating_count(f);
    if (have > 0 && !slot.many) continue;
    SlotState next = state;
    next.floating = with_floating_count(state.floating, f, std::min(have + 1, floating_cap(slot)));
    moves.push_back({true, f, next});
  }
  return moves;
}

bool can_finish(const Production& p, const SlotState& state) {
  const std::size_t n = p.positional.size();
  if (n > 0) {
    if (state.count < p.positional[state.dot].need) return false;
    for (std::size_t d = state.dot + 1; d < n; ++d) {
      if (!p.positional[d].skippable()) return false;
    }
  }
  for (std::size_t f = 0; f < p.floating.size(); ++f) {
    if (state.floating_count(f) < std::min(p.floating[f].need, floating_cap(p.floating[f]))) {
      return false;
    }
  }
  return true;
}

Grammar compile_grammar(const LanguageModel& source, const Registry& registry) {
  const auto diagnostics = validate_model(source);
  std::string problems;
  for (const auto& d : diagnostics) {
    if (d.severity != Severity::error) continue;
    problems += "\n  " + d.path + ": " + d.message;
  }
  for (const auto& e : source.elements) {
    const std::string path = "/elements/" + e.name;
    for (const auto& c : e.constraints) {
      if (!c.name.empty() && registry.constraint(c.name) == nullptr) {
        problems += "\n  " + path + "/constraints: unregistered constraint '" + c.name + "'";
      }
    }
    if (e.probability.mode == ProbabilityMode::evaluator && e.probability.evaluator &&
        registry.evaluator(*e.probability.evaluator) == nullptr) {
      problems += "\n  " + path + "/probability/evaluator: unregistered evaluator '" +
                  *e.probability.evaluator + "'";
    }
    if (e.pattern && e.pattern->strategy == PatternStrategy::heuristic && e.pattern->heuristic_name &&
        registry.heuristic(*e.pattern->heuristic_name) == nullptr) {
      problems += "\n  " + path + "/pattern/heuristicName: unregistered heuristic '" +
                  *e.pattern->heuristic_name + "'";
    }
  }
  if (!problems.empty()) throw CompileError("model '" + source.name + "' does not compile:" + problems);

  Grammar g;
  g.model_ = source;
  normalise_frequencies(g.model_);
  const LanguageModel& model = g.model_;
  const std::size_t count = model.elements.size();
  g.by_lhs_.assign(count, {});
  g.start_ = *model.index_of(model.start);

  for (std::size_t i = 0; i < count; ++i) {
    const ElementDef& e = model.elements[i];
    switch (e.kind) {
      case ElementKind::lexical:
        g.lexical_.push_back(i);
        break;
      case ElementKind::composition: {
        Production p;
        p.lhs = i;
        p.kind = ProductionKind::composition;
        for (std::size_t m = 0; m < e.members.size(); ++m) {
          const MemberDef& def = e.members[m];
          Slot slot;
          slot.member = m;
          slot.symbol = *model.index_of(detail::slot_element(def));
          slot.many = def.multiplicity.many;
          slot.need = detail::member_need(def);
          slot.reference = def.reference;
          if (def.floating) {
            if (slot.need > 15) {
              throw CompileError("/elements/" + e.name + "/members/" + def.name +
                                 ": floating member minimum above 15");
            }
            p.floating.push_back(slot);
          } else {
            p.positional.push_back(slot);
          }
        }
        g.by_lhs_[i].push_back(g.productions_.size());
        g.productions_.push_back(std::move(p));
        break;
      }
      case ElementKind::alternative:
        for (const auto& v : e.variants) {
          Production p;
          p.lhs = i;
          p.kind = ProductionKind::variant;
          Slot slot;
          slot.symbol = *model.index_of(v);
          p.positional.push_back(slot);
          g.by_lhs_[i].push_back(g.productions_.size());
          g.productions_.push_back(std::move(p));
        }
        break;
    }
  }

  const auto order = detail::same_span_order(model);
  g.same_span_rank_.assign(count, 0);
  for (std::size_t r = 0; r < order->size(); ++r) g.same_span_rank_[(*order)[r]] = r;
  return g;
}

}  // namespace graphparse
