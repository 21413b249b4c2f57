#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>
#include <vector>

#include "graphparse/error.hpp"
#include "graphparse/model.hpp"

#include "json.hpp"

namespace graphparse {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

class Reader {
 public:
  explicit Reader(const json& root) : root_(root) {}

  LanguageModel read() {
    const json& top = object(root_, "");
    keys(top, "", {"name", "start", "elements"});
    LanguageModel model;
    model.name = string_field(top, "", "name", true);
    model.start = string_field(top, "", "start", true);
    const json& elements = array_field(top, "", "elements", true);
    for (std::size_t i = 0; i < elements.size(); ++i) {
      model.elements.push_back(element(elements[i], "/elements/" + std::to_string(i)));
    }
    return model;
  }

 private:
  [[noreturn]] static void fail(const std::string& path, const std::string& message) {
    throw ModelLoadError(path.empty() ? "/" : path, message);
  }

  static const json& object(const json& j, const std::string& path) {
    if (!j.is_object()) fail(path, "expected an object");
    return j;
  }

  static void keys(const json& j, const std::string& path,
                   std::initializer_list<std::string_view> allowed) {
    for (const auto& [key, _] : j.items()) {
      bool ok = false;
      for (auto a : allowed) ok = ok || key == a;
      if (!ok) fail(path + "/" + key, "unknown key '" + key + "'");
    }
  }

  static std::string string_field(const json& j, const std::string& path, const char* key,
                                  bool required) {
    auto it = j.find(key);
    if (it == j.end()) {
      if (required) fail(path + "/" + key, "missing required field");
      return {};
    }
    if (!it->is_string()) fail(path + "/" + key, "expected a string");
    return it->get<std::string>();
  }

  static bool bool_field(const json& j, const std::string& path, const char* key) {
    auto it = j.find(key);
    if (it == j.end()) return false;
    if (!it->is_boolean()) fail(path + "/" + key, "expected a boolean");
    return it->get<bool>();
  }

  static const json& array_field(const json& j, const std::string& path, const char* key,
                                 bool required) {
    static const json empty = json::array();
    auto it = j.find(key);
    if (it == j.end()) {
      if (required) fail(path + "/" + key, "missing required field");
      return empty;
    }
    if (!it->is_array()) fail(path + "/" + key, "expected an array");
    return *it;
  }

  ElementDef element(const json& j, const std::string& path) {
    object(j, path);
    keys(j, path,
         {"name", "kind", "pattern", "members", "variants", "constraints", "probability"});
    ElementDef def;
    def.name = string_field(j, path, "name", true);
    std::string kind = string_field(j, path, "kind", true);
    if (kind == "lexical") {
      def.kind = ElementKind::lexical;
    } else if (kind == "composition") {
      def.kind = ElementKind::composition;
    } else if (kind == "alternative") {
      def.kind = ElementKind::alternative;
    } else {
      fail(path + "/kind", "unknown kind '" + kind + "'");
    }
    if (auto it = j.find("pattern"); it != j.end()) def.pattern = pattern(*it, path + "/pattern");
    const json& members = array_field(j, path, "members", false);
    for (std::size_t i = 0; i < members.size(); ++i) {
      def.members.push_back(member(members[i], path + "/members/" + std::to_string(i)));
    }
    const json& variants = array_field(j, path, "variants", false);
    for (std::size_t i = 0; i < variants.size(); ++i) {
      if (!variants[i].is_string()) {
        fail(path + "/variants/" + std::to_string(i), "expected a string");
      }
      def.variants.push_back(variants[i].get<std::string>());
    }
    const json& constraints = array_field(j, path, "constraints", false);
    for (std::size_t i = 0; i < constraints.size(); ++i) {
      def.constraints.push_back(constraint(constraints[i], path + "/constraints/" + std::to_string(i)));
    }
    if (auto it = j.find("probability"); it != j.end()) {
      def.probability = probability(*it, path + "/probability");
    }
    return def;
  }

  PatternSpec pattern(const json& j, const std::string& path) {
    object(j, path);
    keys(j, path, {"strategy", "expression", "lexiconClass", "heuristicName", "open"});
    PatternSpec spec;
    std::string strategy = string_field(j, path, "strategy", true);
    if (strategy == "regex") {
      spec.strategy = PatternStrategy::regex;
    } else if (strategy == "lexicon") {
      spec.strategy = PatternStrategy::lexicon;
    } else if (strategy == "heuristic") {
      spec.strategy = PatternStrategy::heuristic;
    } else {
      fail(path + "/strategy", "unknown strategy '" + strategy + "'");
    }
    if (j.contains("expression")) spec.expression = string_field(j, path, "expression", true);
    if (j.contains("lexiconClass")) spec.lexicon_class = string_field(j, path, "lexiconClass", true);
    if (j.contains("heuristicName")) {
      spec.heuristic_name = string_field(j, path, "heuristicName", true);
    }
    spec.open = bool_field(j, path, "open");
    return spec;
  }

  MemberDef member(const json& j, const std::string& path) {
    object(j, path);
    keys(j, path,
         {"name", "target", "optional", "floating", "multiplicity", "reference", "referenceForm",
          "allowUnresolved"});
    MemberDef m;
    m.name = string_field(j, path, "name", true);
    m.target = string_field(j, path, "target", true);
    m.optional = bool_field(j, path, "optional");
    m.floating = bool_field(j, path, "floating");
    m.reference = bool_field(j, path, "reference");
    m.reference_form = string_field(j, path, "referenceForm", false);
    m.allow_unresolved = bool_field(j, path, "allowUnresolved");
    if (auto it = j.find("multiplicity"); it != j.end()) {
      const std::string mpath = path + "/multiplicity";
      if (it->is_string()) {
        if (it->get<std::string>() != "one") {
          fail(mpath, "unknown multiplicity '" + it->get<std::string>() + "'");
        }
      } else if (it->is_object()) {
        keys(*it, mpath, {"many"});
        auto many = it->find("many");
        if (many == it->end()) fail(mpath, "expected \"one\" or {\"many\":{\"min\":n}}");
        object(*many, mpath + "/many");
        keys(*many, mpath + "/many", {"min"});
        m.multiplicity.many = true;
        m.multiplicity.min = 0;
        if (auto min = many->find("min"); min != many->end()) {
          if (!min->is_number_integer()) fail(mpath + "/many/min", "expected an integer");
          m.multiplicity.min = min->get<std::int64_t>();
        }
      } else {
        fail(mpath, "expected \"one\" or {\"many\":{\"min\":n}}");
      }
    }
    return m;
  }

  ConstraintSpec constraint(const json& j, const std::string& path) {
    object(j, path);
    keys(j, path, {"name", "params"});
    ConstraintSpec c;
    c.name = string_field(j, path, "name", true);
    if (auto it = j.find("params"); it != j.end()) {
      object(*it, path + "/params");
      for (const auto& [key, value] : it->items()) {
        if (!value.is_string()) fail(path + "/params/" + key, "expected a string");
        c.params[key] = value.get<std::string>();
      }
    }
    return c;
  }

  ProbabilitySpec probability(const json& j, const std::string& path) {
    object(j, path);
    keys(j, path, {"mode", "value", "frequency", "evaluator", "memberPresence"});
    ProbabilitySpec p;
    std::string mode = string_field(j, path, "mode", true);
    if (mode == "value") {
      p.mode = ProbabilityMode::value;
    } else if (mode == "frequency") {
      p.mode = ProbabilityMode::frequency;
    } else if (mode == "evaluator") {
      p.mode = ProbabilityMode::evaluator;
    } else if (mode == "default") {
      p.mode = ProbabilityMode::default_mode;
    } else {
      fail(path + "/mode", "unknown mode '" + mode + "'");
    }
    if (auto it = j.find("value"); it != j.end()) {
      if (!it->is_number()) fail(path + "/value", "expected a number");
      p.value = it->get<double>();
    }
    if (auto it = j.find("frequency"); it != j.end()) {
      if (!it->is_number_integer()) fail(path + "/frequency", "expected an integer");
      p.frequency = it->get<std::int64_t>();
    }
    if (j.contains("evaluator")) p.evaluator = string_field(j, path, "evaluator", true);
    if (auto it = j.find("memberPresence"); it != j.end()) {
      object(*it, path + "/memberPresence");
      for (const auto& [key, value] : it->items()) {
        if (!value.is_number()) fail(path + "/memberPresence/" + key, "expected a number");
        p.member_presence[key] = value.get<double>();
      }
    }
    return p;
  }

  const json& root_;
};

// Rejects repeated keys inside one object while parsing.
class DuplicateKeyGuard {
 public:
  bool operator()(int depth, json::parse_event_t event, json& parsed) {
    switch (event) {
      case json::parse_event_t::object_start:
        stack_.emplace_back();
        break;
      case json::parse_event_t::object_end:
        if (!stack_.empty()) stack_.pop_back();
        break;
      case json::parse_event_t::key: {
        std::string key = parsed.get<std::string>();
        if (!stack_.empty() && !stack_.back().insert(key).second) {
          throw ModelLoadError("depth " + std::to_string(depth), "duplicate field '" + key + "'");
        }
        break;
      }
      default:
        break;
    }
    return true;
  }

 private:
  std::vector<std::set<std::string>> stack_;
};

ordered_json write_member(const MemberDef& m) {
  ordered_json j;
  j["name"] = m.name;
  j["target"] = m.target;
  if (m.optional) j["optional"] = true;
  if (m.floating) j["floating"] = true;
  if (m.multiplicity.many) {
    j["multiplicity"] = {{"many", {{"min", m.multiplicity.min}}}};
  }
  if (m.reference) j["reference"] = true;
  if (!m.reference_form.empty()) j["referenceForm"] = m.reference_form;
  if (m.allow_unresolved) j["allowUnresolved"] = true;
  return j;
}

ordered_json write_element(const ElementDef& e) {
  ordered_json j;
  j["name"] = e.name;
  j["kind"] = std::string(to_string(e.kind));
  if (e.pattern) {
    ordered_json p;
    p["strategy"] = std::string(to_string(e.pattern->strategy));
    if (e.pattern->expression) p["expression"] = *e.pattern->expression;
    if (e.pattern->lexicon_class) p["lexiconClass"] = *e.pattern->lexicon_class;
    if (e.pattern->heuristic_name) p["heuristicName"] = *e.pattern->heuristic_name;
    if (e.pattern->open) p["open"] = true;
    j["pattern"] = p;
  }
  if (!e.members.empty()) {
    j["members"] = ordered_json::array();
    for (const auto& m : e.members) j["members"].push_back(write_member(m));
  }
  if (!e.variants.empty()) j["variants"] = e.variants;
  if (!e.constraints.empty()) {
    j["constraints"] = ordered_json::array();
    for (const auto& c : e.constraints) {
      ordered_json cj;
      cj["name"] = c.name;
      if (!c.params.empty()) cj["params"] = c.params;
      j["constraints"].push_back(cj);
    }
  }
  const ProbabilitySpec& p = e.probability;
  if (p != ProbabilitySpec{}) {
    ordered_json pj;
    pj["mode"] = std::string(to_string(p.mode));
    if (p.value) pj["value"] = *p.value;
    if (p.frequency) pj["frequency"] = *p.frequency;
    if (p.evaluator) pj["evaluator"] = *p.evaluator;
    if (!p.member_presence.empty()) pj["memberPresence"] = p.member_presence;
    j["probability"] = pj;
  }
  return j;
}

}  // namespace

LanguageModel load_model(std::string_view document) {
  json root;
  try {
    root = json::parse(document.begin(), document.end(), DuplicateKeyGuard{});
  } catch (const json::parse_error& e) {
    throw ModelLoadError("byte " + std::to_string(e.byte), "syntax error: " + std::string(e.what()));
  }
  return Reader(root).read();
}

LanguageModel load_model_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read model file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return load_model(buffer.str());
}

std::string serialize_model(const LanguageModel& model) {
  ordered_json j;
  j["name"] = model.name;
  j["start"] = model.start;
  j["elements"] = ordered_json::array();
  for (const auto& e : model.elements) j["elements"].push_back(write_element(e));
  return j.dump(2) + "\n";
}

}  // namespace graphparse
