#include <algorithm>
#include <map>
#include <regex>
#include <set>

#include "analysis.hpp"
#include "graphparse/model.hpp"

namespace graphparse {
namespace detail {

std::vector<std::vector<std::size_t>> same_span_edges(const LanguageModel& model) {
  std::map<std::string_view, std::size_t> index;
  for (std::size_t i = 0; i < model.elements.size(); ++i) index.emplace(model.elements[i].name, i);
  auto lookup = [&](const std::string& name) -> std::optional<std::size_t> {
    auto it = index.find(name);
    if (it == index.end()) return std::nullopt;
    return it->second;
  };

  std::vector<std::vector<std::size_t>> edges(model.elements.size());
  for (std::size_t i = 0; i < model.elements.size(); ++i) {
    const ElementDef& e = model.elements[i];
    if (e.kind == ElementKind::alternative) {
      for (const auto& v : e.variants) {
        if (auto j = lookup(v)) edges[i].push_back(*j);
      }
    } else if (e.kind == ElementKind::composition) {
      for (std::size_t m = 0; m < e.members.size(); ++m) {
        if (member_need(e.members[m]) > 1) continue;
        bool others_skippable = true;
        for (std::size_t o = 0; o < e.members.size(); ++o) {
          if (o != m && member_need(e.members[o]) > 0) others_skippable = false;
        }
        if (!others_skippable) continue;
        if (auto j = lookup(slot_element(e.members[m]))) edges[i].push_back(*j);
      }
    }
    std::sort(edges[i].begin(), edges[i].end());
    edges[i].erase(std::unique(edges[i].begin(), edges[i].end()), edges[i].end());
  }
  return edges;
}

std::optional<std::vector<std::size_t>> same_span_order(const LanguageModel& model,
                                                        std::vector<std::size_t>* cyclic) {
  const auto edges = same_span_edges(model);
  const std::size_t n = edges.size();

  // Tarjan's strongly connected components, iterative.
  std::vector<int> index_of(n, -1), low(n, 0);
  std::vector<bool> on_stack(n, false);
  std::vector<std::size_t> stack;
  std::vector<std::size_t> on_cycle;
  int counter = 0;
  for (std::size_t root = 0; root < n; ++root) {
    if (index_of[root] >= 0) continue;
    std::vector<std::pair<std::size_t, std::size_t>> work{{root, 0}};
    while (!work.empty()) {
      auto& [v, next] = work.back();
      if (next == 0 && index_of[v] < 0) {
        index_of[v] = low[v] = counter++;
        stack.push_back(v);
        on_stack[v] = true;
      }
      if (next < edges[v].size()) {
        std::size_t w = edges[v][next++];
        if (index_of[w] < 0) {
          work.emplace_back(w, 0);
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], index_of[w]);
        }
        continue;
      }
      if (low[v] == index_of[v]) {
        std::vector<std::size_t> component;
        std::size_t w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
          component.push_back(w);
        } while (w != v);
        bool self_loop = std::find(edges[v].begin(), edges[v].end(), v) != edges[v].end();
        if (component.size() > 1 || self_loop) {
          on_cycle.insert(on_cycle.end(), component.begin(), component.end());
        }
      }
      std::size_t finished = v;
      work.pop_back();
      if (!work.empty()) {
        std::size_t parent = work.back().first;
        low[parent] = std::min(low[parent], low[finished]);
      }
    }
  }
  if (!on_cycle.empty()) {
    if (cyclic != nullptr) {
      std::sort(on_cycle.begin(), on_cycle.end());
      *cyclic = on_cycle;
    }
    return std::nullopt;
  }

  // Post-order DFS puts wrapped elements before their wrappers.
  std::vector<std::size_t> order;
  std::vector<bool> done(n, false);
  for (std::size_t root = 0; root < n; ++root) {
    if (done[root]) continue;
    std::vector<std::pair<std::size_t, std::size_t>> work{{root, 0}};
    done[root] = true;
    while (!work.empty()) {
      auto& [v, next] = work.back();
      if (next < edges[v].size()) {
        std::size_t w = edges[v][next++];
        if (!done[w]) {
          done[w] = true;
          work.emplace_back(w, 0);
        }
        continue;
      }
      order.push_back(v);
      work.pop_back();
    }
  }
  return order;
}

}  // namespace detail

namespace {

struct Collector {
  std::vector<std::pair<std::ptrdiff_t, Diagnostic>> items;

  void add(std::ptrdiff_t element, Severity severity, std::string path, std::string message) {
    items.push_back({element, Diagnostic{severity, std::move(path), std::move(message)}});
  }
};

bool in_unit_interval(double v) { return v >= 0.0 && v <= 1.0; }

}  // namespace

std::vector<Diagnostic> validate_model(const LanguageModel& model) {
  Collector out;
  std::map<std::string_view, std::size_t> first_index;
  for (std::size_t i = 0; i < model.elements.size(); ++i) {
    first_index.emplace(model.elements[i].name, i);
  }
  auto find = [&](const std::string& name) -> const ElementDef* {
    auto it = first_index.find(name);
    return it == first_index.end() ? nullptr : &model.elements[it->second];
  };

  if (model.name.empty()) out.add(-1, Severity::error, "/name", "model name is empty");
  if (find(model.start) == nullptr) {
    out.add(-1, Severity::error, "/start", "start element '" + model.start + "' is not declared");
  }

  // Parent alternatives of every element, for frequency normalisation.
  std::map<std::string_view, std::vector<std::size_t>> parents;
  for (std::size_t i = 0; i < model.elements.size(); ++i) {
    if (model.elements[i].kind != ElementKind::alternative) continue;
    for (const auto& v : model.elements[i].variants) parents[v].push_back(i);
  }

  for (std::size_t i = 0; i < model.elements.size(); ++i) {
    const ElementDef& e = model.elements[i];
    const auto idx = static_cast<std::ptrdiff_t>(i);
    const std::string path = "/elements/" + (e.name.empty() ? std::to_string(i) : e.name);
    if (e.name.empty()) out.add(idx, Severity::error, path + "/name", "element name is empty");
    if (first_index[e.name] != i) {
      out.add(idx, Severity::error, path, "duplicate element name '" + e.name + "'");
    }

    // Kind-specific fields.
    switch (e.kind) {
      case ElementKind::lexical:
        if (!e.pattern) out.add(idx, Severity::error, path + "/pattern", "lexical element needs a pattern");
        if (!e.members.empty()) out.add(idx, Severity::error, path + "/members", "lexical element cannot have members");
        if (!e.variants.empty()) out.add(idx, Severity::error, path + "/variants", "lexical element cannot have variants");
        break;
      case ElementKind::composition:
        if (e.members.empty()) out.add(idx, Severity::error, path + "/members", "composition needs at least one member");
        if (e.pattern) out.add(idx, Severity::error, path + "/pattern", "only lexical elements take a pattern");
        if (!e.variants.empty()) out.add(idx, Severity::error, path + "/variants", "composition cannot have variants");
        break;
      case ElementKind::alternative:
        if (e.variants.empty()) out.add(idx, Severity::error, path + "/variants", "alternative needs at least one variant");
        if (e.pattern) out.add(idx, Severity::error, path + "/pattern", "only lexical elements take a pattern");
        if (!e.members.empty()) out.add(idx, Severity::error, path + "/members", "alternative cannot have members");
        break;
    }

    std::set<std::string_view> seen_variants;
    for (const auto& v : e.variants) {
      if (find(v) == nullptr) {
        out.add(idx, Severity::error, path + "/variants/" + v, "variant '" + v + "' is not declared");
      }
      if (!seen_variants.insert(v).second) {
        out.add(idx, Severity::error, path + "/variants/" + v, "variant listed twice");
      }
    }

    if (e.pattern) {
      const PatternSpec& p = *e.pattern;
      const std::string ppath = path + "/pattern";
      switch (p.strategy) {
        case PatternStrategy::regex:
          if (!p.expression || p.expression->empty()) {
            out.add(idx, Severity::error, ppath + "/expression", "regex pattern needs an expression");
          } else {
            try {
              std::regex compiled(*p.expression, std::regex::ECMAScript);
            } catch (const std::regex_error& err) {
              out.add(idx, Severity::error, ppath + "/expression",
                      std::string("regex does not compile: ") + err.what());
            }
          }
          if (p.lexicon_class || p.heuristic_name) {
            out.add(idx, Severity::error, ppath, "regex pattern carries fields of another strategy");
          }
          break;
        case PatternStrategy::lexicon:
          if (!p.lexicon_class || p.lexicon_class->empty()) {
            out.add(idx, Severity::error, ppath + "/lexiconClass", "lexicon pattern needs a word class");
          }
          if (p.expression || p.heuristic_name) {
            out.add(idx, Severity::error, ppath, "lexicon pattern carries fields of another strategy");
          }
          break;
        case PatternStrategy::heuristic:
          if (!p.heuristic_name || p.heuristic_name->empty()) {
            out.add(idx, Severity::error, ppath + "/heuristicName", "heuristic pattern needs a matcher name");
          }
          if (p.expression || p.lexicon_class) {
            out.add(idx, Severity::error, ppath, "heuristic pattern carries fields of another strategy");
          }
          break;
      }
      if (p.open && p.strategy != PatternStrategy::lexicon) {
        out.add(idx, Severity::warning, ppath + "/open", "open flag only affects lexicon patterns");
      }
    }

    std::set<std::string_view> member_names;
    std::size_t floating = 0;
    for (const auto& m : e.members) {
      const std::string mpath = path + "/members/" + m.name;
      if (m.name.empty()) out.add(idx, Severity::error, mpath, "member name is empty");
      if (!member_names.insert(m.name).second) {
        out.add(idx, Severity::error, mpath, "duplicate member name '" + m.name + "'");
      }
      if (find(m.target) == nullptr) {
        out.add(idx, Severity::error, mpath + "/target", "target '" + m.target + "' is not declared");
      }
      if (m.multiplicity.many && m.multiplicity.min < 0) {
        out.add(idx, Severity::error, mpath + "/multiplicity", "minimum count is negative");
      }
      if (m.reference) {
        const ElementDef* form = find(m.reference_form);
        if (m.reference_form.empty()) {
          out.add(idx, Severity::error, mpath + "/referenceForm", "reference member needs a reference form");
        } else if (form == nullptr) {
          out.add(idx, Severity::error, mpath + "/referenceForm",
                  "reference form '" + m.reference_form + "' is not declared");
        } else if (form->kind != ElementKind::lexical) {
          out.add(idx, Severity::error, mpath + "/referenceForm", "reference form must be a lexical element");
        }
      } else {
        if (!m.reference_form.empty()) {
          out.add(idx, Severity::error, mpath + "/referenceForm", "reference form on a non-reference member");
        }
        if (m.allow_unresolved) {
          out.add(idx, Severity::warning, mpath + "/allowUnresolved", "allowUnresolved on a non-reference member");
        }
      }
      if (m.floating) ++floating;
    }
    if (floating > 16) {
      out.add(idx, Severity::error, path + "/members", "more than 16 floating members");
    }
    if (detail::nullable(e)) {
      out.add(idx, Severity::error, path + "/members", "every member is optional, so the element matches empty input");
    }

    const ProbabilitySpec& p = e.probability;
    const std::string prob = path + "/probability";
    switch (p.mode) {
      case ProbabilityMode::value:
        if (!p.value) {
          out.add(idx, Severity::error, prob + "/value", "value mode needs a value");
        } else if (!in_unit_interval(*p.value)) {
          out.add(idx, Severity::error, prob + "/value", "probability out of range");
        }
        break;
      case ProbabilityMode::frequency: {
        if (!p.frequency) {
          out.add(idx, Severity::error, prob + "/frequency", "frequency mode needs a frequency");
        } else if (*p.frequency < 0) {
          out.add(idx, Severity::error, prob + "/frequency", "frequency is negative");
        }
        auto it = parents.find(e.name);
        std::size_t count = it == parents.end() ? 0 : it->second.size();
        if (count != 1) {
          out.add(idx, Severity::error, prob,
                  "frequency mode needs exactly one parent alternative to normalise against (found " +
                      std::to_string(count) + ")");
        } else {
          const ElementDef& parent = model.elements[it->second.front()];
          std::int64_t total = 0;
          for (const auto& v : parent.variants) {
            const ElementDef* sibling = find(v);
            if (sibling && sibling->probability.mode == ProbabilityMode::frequency &&
                sibling->probability.frequency && *sibling->probability.frequency > 0) {
              total += *sibling->probability.frequency;
            }
          }
          if (total == 0) {
            out.add(idx, Severity::error, prob, "sibling frequencies under '" + parent.name + "' sum to zero");
          }
        }
        break;
      }
      case ProbabilityMode::evaluator:
        if (!p.evaluator || p.evaluator->empty()) {
          out.add(idx, Severity::error, prob + "/evaluator", "evaluator mode needs an evaluator name");
        }
        break;
      case ProbabilityMode::default_mode:
        break;
    }
    const bool presence_used =
        p.mode == ProbabilityMode::value || p.mode == ProbabilityMode::frequency;
    for (const auto& [name, presence] : p.member_presence) {
      const std::string ppath = prob + "/memberPresence/" + name;
      const MemberDef* m = e.find_member(name);
      if (m == nullptr) {
        out.add(idx, Severity::error, ppath, "presence given for unknown member '" + name + "'");
      } else if (!m->is_optional()) {
        out.add(idx, Severity::error, ppath, "presence given for non-optional member '" + name + "'");
      }
      if (!in_unit_interval(presence)) {
        out.add(idx, Severity::error, ppath, "presence probability out of range");
      }
    }
    if (!p.member_presence.empty() && !presence_used) {
      out.add(idx, Severity::warning, prob + "/memberPresence",
              "member presence is ignored outside value and frequency modes");
    }
    if (presence_used) {
      for (const auto& m : e.members) {
        if (m.is_optional() && !p.member_presence.contains(m.name)) {
          out.add(idx, Severity::notice, path + "/members/" + m.name,
                  "optional member has no presence probability; using 0.5");
        }
      }
    }

    for (std::size_t c = 0; c < e.constraints.size(); ++c) {
      if (e.constraints[c].name.empty()) {
        out.add(idx, Severity::error, path + "/constraints/" + std::to_string(c), "constraint name is empty");
      }
    }
  }

  std::vector<std::size_t> cyclic;
  if (!detail::same_span_order(model, &cyclic)) {
    for (std::size_t i : cyclic) {
      out.add(static_cast<std::ptrdiff_t>(i), Severity::error, "/elements/" + model.elements[i].name,
              "element can derive itself without consuming input");
    }
  }

  // Reachability from the start element.
  if (const ElementDef* start = find(model.start)) {
    std::set<std::string_view> reached{start->name};
    std::vector<const ElementDef*> stack{start};
    while (!stack.empty()) {
      const ElementDef* e = stack.back();
      stack.pop_back();
      auto visit = [&](const std::string& name) {
        const ElementDef* next = find(name);
        if (next && reached.insert(next->name).second) stack.push_back(next);
      };
      for (const auto& v : e->variants) visit(v);
      for (const auto& m : e->members) {
        visit(m.target);
        if (m.reference) visit(m.reference_form);
      }
    }
    for (std::size_t i = 0; i < model.elements.size(); ++i) {
      if (!reached.contains(model.elements[i].name)) {
        out.add(static_cast<std::ptrdiff_t>(i), Severity::warning,
                "/elements/" + model.elements[i].name, "element is unreachable from the start element");
      }
    }
  }

  std::stable_sort(out.items.begin(), out.items.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<Diagnostic> result;
  result.reserve(out.items.size());
  for (auto& [_, d] : out.items) result.push_back(std::move(d));
  return result;
}

}  // namespace graphparse
