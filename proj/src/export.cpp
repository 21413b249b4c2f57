#include "graphparse/export.hpp"

#include <cstdio>
#include <functional>

namespace graphparse {

using nlohmann::ordered_json;

namespace {

std::string dot_escape(std::string_view text) {
  std::string out;
  for (char c : text) {
    if (c == '"' || c == '\\') out.push_back('\\');
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out.push_back(c);
  }
  return out;
}

std::string number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace

ordered_json to_json(const LexicalAnalysisGraph& graph) {
  ordered_json out;
  out["tokens"] = ordered_json::array();
  for (const auto& t : graph.tokens) {
    out["tokens"].push_back({{"id", t.id},
                             {"element", t.element},
                             {"start", t.span.start},
                             {"end", t.span.end},
                             {"lexeme", t.lexeme},
                             {"posProb", t.pos_prob}});
  }
  out["edges"] = ordered_json::array();
  for (const auto& [a, b] : graph.edges) out["edges"].push_back({a, b});
  return out;
}

std::string to_dot(const LexicalAnalysisGraph& graph) {
  std::string out = "digraph lexical {\n  rankdir=LR;\n";
  for (const auto& t : graph.tokens) {
    out += "  t" + std::to_string(t.id) + " [label=\"" +
           dot_escape(t.lexeme + "/" + t.element + "/" + number(t.pos_prob)) + "\"];\n";
  }
  for (const auto& [a, b] : graph.edges) {
    out += "  t" + std::to_string(a) + " -> t" + std::to_string(b) + ";\n";
  }
  out += "}\n";
  return out;
}

std::string to_text(const LexicalAnalysisGraph& graph) {
  std::string out;
  for (const auto& t : graph.tokens) {
    out += std::to_string(t.id) + "\t" + to_string(t.span) + "\t" + t.element + "\t" + t.lexeme + "\t" +
           number(t.pos_prob) + "\n";
  }
  for (const auto& [a, b] : graph.edges) {
    out += std::to_string(a) + " -> " + std::to_string(b) + "\n";
  }
  return out;
}

ordered_json to_json(const ParseForest& forest) {
  ordered_json out;
  out["nodes"] = ordered_json::array();
  for (const auto& node : forest.nodes()) {
    ordered_json j;
    j["id"] = node.id;
    j["element"] = forest.grammar().name(node.element);
    j["start"] = node.span.start;
    j["end"] = node.span.end;
    ordered_json alternatives = ordered_json::array();
    for (const auto& d : node.derivations) {
      ordered_json children = ordered_json::array();
      for (const auto& c : d.children) children.push_back(c.node);
      alternatives.push_back(children);
      if (d.token != npos) j["token"] = d.token;
    }
    j["alternatives"] = alternatives;
    out["nodes"].push_back(j);
  }
  out["roots"] = forest.roots();
  return out;
}

ordered_json tree_to_json(const ParseGraphCandidate& tree) {
  std::function<ordered_json(std::size_t)> node = [&](std::size_t id) {
    const ElementInstance& inst = tree.at(id);
    ordered_json j;
    j["id"] = inst.id;
    j["element"] = inst.element;
    j["span"] = {inst.span.start, inst.span.end};
    j["score"] = inst.score.value();
    ordered_json members = ordered_json::object();
    for (const auto& m : inst.members) {
      ordered_json list = ordered_json::array();
      for (std::size_t c : m.children) list.push_back(node(c));
      members[m.member] = list;
    }
    j["members"] = members;
    if (inst.variant) j["variant"] = node(*inst.variant);
    if (inst.token) {
      j["lexeme"] = inst.token->lexeme;
      j["tokenId"] = inst.token->id;
      j["posProb"] = inst.token->pos_prob;
    }
    return j;
  };
  return tree.instances.empty() ? ordered_json::object() : node(tree.root);
}

ordered_json score_to_json(const ScoreBreakdown& breakdown, bool explain) {
  ordered_json j;
  j["algebra"] = breakdown.score.algebra();
  j["value"] = breakdown.score.value();
  if (explain) {
    j["factors"] = ordered_json::array();
    for (const auto& f : breakdown.factors) {
      j["factors"].push_back({{std::string(to_string(f.kind)), f.id}, {"value", f.value}});
    }
  }
  return j;
}

ordered_json to_json(const AbstractSyntaxGraph& graph, const std::optional<ScoreBreakdown>& breakdown,
                     bool explain) {
  ordered_json j;
  j["tree"] = tree_to_json(graph.tree);
  j["references"] = ordered_json::array();
  for (const auto& r : graph.references) {
    ordered_json e;
    e["from"] = {r.from, r.member};
    e["to"] = r.to ? ordered_json(*r.to) : ordered_json(nullptr);
    e["kind"] = r.kind ? ordered_json(std::string(to_string(*r.kind))) : ordered_json(nullptr);
    e["score"] = r.score.value();
    j["references"].push_back(e);
  }
  if (breakdown) {
    j["score"] = score_to_json(*breakdown, explain);
  } else {
    j["score"] = score_to_json(ScoreBreakdown{graph.score, {}}, false);
  }
  return j;
}

std::string to_dot(const AbstractSyntaxGraph& graph, const std::string& name) {
  const ParseGraphCandidate& tree = graph.tree;
  std::string out = "digraph " + name + " {\n";
  for (const auto& inst : tree.instances) {
    out += "  n" + std::to_string(inst.id) + " [label=\"" + dot_escape(inst.element) +
           (inst.token ? "\\n" + dot_escape(inst.token->lexeme) : std::string()) + "\"];\n";
  }
  for (const auto& inst : tree.instances) {
    if (inst.variant) {
      out += "  n" + std::to_string(inst.id) + " -> n" + std::to_string(*inst.variant) + ";\n";
    }
    for (const auto& m : inst.members) {
      for (std::size_t c : m.children) {
        out += "  n" + std::to_string(inst.id) + " -> n" + std::to_string(c) + " [label=\"" +
               dot_escape(m.member) + "\"];\n";
      }
    }
  }
  for (const auto& r : graph.references) {
    if (!r.to) continue;
    out += "  n" + std::to_string(r.from) + " -> n" + std::to_string(*r.to) + " [style=dashed, label=\"" +
           dot_escape(r.member + " (" + std::string(to_string(*r.kind)) + ")") + "\"];\n";
  }
  out += "}\n";
  return out;
}

std::string to_text(const AbstractSyntaxGraph& graph) {
  const ParseGraphCandidate& tree = graph.tree;
  std::string out;
  std::function<void(std::size_t, const std::string&, std::size_t)> walk =
      [&](std::size_t id, const std::string& role, std::size_t indent) {
        const ElementInstance& inst = tree.at(id);
        out += std::string(indent * 2, ' ');
        if (!role.empty()) out += role + ": ";
        out += inst.element + " " + to_string(inst.span);
        if (inst.token) out += " \"" + inst.token->lexeme + "\"";
        out += "  #" + std::to_string(id) + "\n";
        if (inst.variant) walk(*inst.variant, "", indent + 1);
        for (const auto& m : inst.members) {
          for (std::size_t c : m.children) walk(c, m.member, indent + 1);
        }
      };
  if (!tree.instances.empty()) walk(tree.root, "", 0);
  for (const auto& r : graph.references) {
    out += "reference #" + std::to_string(r.from) + "." + r.member + " -> ";
    if (r.to) {
      out += "#" + std::to_string(*r.to) + " (" + std::string(to_string(*r.kind)) + ")";
    } else {
      out += "unresolved";
    }
    out += " " + number(r.score.value()) + "\n";
  }
  out += "score " + graph.score.algebra() + " " + number(graph.score.value()) + "\n";
  return out;
}

}  // namespace graphparse
