#include "graphparse/registry.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

#include "graphparse/error.hpp"
#include "graphparse/resolver.hpp"
#include "json.hpp"

namespace graphparse {

const std::vector<ChildView>* InstanceView::find(std::string_view member) const {
  for (const auto& m : members) {
    if (m.member == member) return &m.children;
  }
  return nullptr;
}

namespace {

using ConstraintFactory = std::function<ConstraintFn(const ConstraintParams&)>;
using EvaluatorFactory = std::function<EvaluatorFn(const ConstraintParams&)>;

std::string fold(std::string_view text) {
  std::string out(text);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string param(const ConstraintParams& params, const std::string& key,
                  const std::string& fallback = {}) {
  auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

std::string required_param(const ConstraintParams& params, const std::string& key,
                           std::string_view constraint) {
  auto it = params.find(key);
  if (it == params.end()) {
    throw RegistryError(std::string(constraint) + ": missing parameter '" + key + "'");
  }
  return it->second;
}

double number_param(const ConstraintParams& params, const std::string& key, double fallback) {
  auto it = params.find(key);
  if (it == params.end()) return fallback;
  try {
    std::size_t used = 0;
    double v = std::stod(it->second, &used);
    if (used != it->second.size()) throw std::invalid_argument(key);
    return v;
  } catch (const std::exception&) {
    throw RegistryError("parameter '" + key + "' is not a number: " + it->second);
  }
}

std::vector<std::string> word_list(const std::string& csv) {
  std::vector<std::string> out;
  std::stringstream in(csv);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(fold(item));
  }
  return out;
}

bool listed(const std::vector<std::string>& words, const std::string& w) {
  return std::find(words.begin(), words.end(), w) != words.end();
}

std::string last_word(std::string_view text) {
  auto pos = text.find_last_of(' ');
  return fold(pos == std::string_view::npos ? text : text.substr(pos + 1));
}

bool looks_plural(const std::string& word) {
  return word.size() > 3 && word.back() == 's' && word[word.size() - 2] != 's';
}

// Parameters given at the use site override those bound by an alias.
ConstraintParams merged(const ConstraintParams& bound, const ConstraintParams& site) {
  ConstraintParams out = bound;
  for (const auto& [k, v] : site) out[k] = v;
  return out;
}

bool member_equals(const InstanceView& view, const ConstraintParams& params, const EvaluationContext&) {
  const auto* children = view.find(required_param(params, "member", "member_equals"));
  if (children == nullptr) return false;
  const std::string lexeme = fold(required_param(params, "lexeme", "member_equals"));
  for (const auto& c : *children) {
    if (fold(c.text) != lexeme) return false;
  }
  return true;
}

bool requires_member(const InstanceView& view, const ConstraintParams& params, const EvaluationContext&) {
  return view.has(required_param(params, "member", "requires_member"));
}

bool number_agreement(const InstanceView& view, const ConstraintParams& params, const EvaluationContext&) {
  const auto* det = view.find(param(params, "determiner", "determiner"));
  const auto* noun = view.find(param(params, "noun", "noun"));
  if (det == nullptr || noun == nullptr || det->empty() || noun->empty()) return true;
  const auto singular = word_list(param(params, "singular", "a,an,another,each,every,one,this,that"));
  const auto plural = word_list(param(params, "plural", "these,those,many,several,few,both,two,three"));
  const std::string d = fold(det->front().text);
  const bool noun_plural = looks_plural(last_word(noun->back().text));
  if (listed(singular, d) && noun_plural) return false;
  if (listed(plural, d) && !noun_plural) return false;
  return true;
}

bool precedes(const InstanceView& view, const ConstraintParams& params, const EvaluationContext&) {
  const auto* first = view.find(required_param(params, "first", "precedes"));
  const auto* second = view.find(required_param(params, "second", "precedes"));
  if (first == nullptr || second == nullptr) return true;
  for (const auto& a : *first) {
    for (const auto& b : *second) {
      if (a.span.end > b.span.start) return false;
    }
  }
  return true;
}

bool conjunction_between(const InstanceView& view, const ConstraintParams& params,
                         const EvaluationContext&) {
  const auto* conj = view.find(required_param(params, "conjunction", "conjunction_between"));
  const auto* items = view.find(required_param(params, "items", "conjunction_between"));
  if (conj == nullptr) return true;
  if (items == nullptr || items->size() < 2) return false;
  const std::size_t lo = items->front().span.end;
  const std::size_t hi = items->back().span.start;
  for (const auto& c : *conj) {
    if (c.span.start < lo || c.span.end > hi) return false;
  }
  return true;
}

const std::map<std::string, ConstraintFn, std::less<>>& constraint_bases() {
  static const std::map<std::string, ConstraintFn, std::less<>> bases = {
      {"member_equals", member_equals},
      {"requires_member", requires_member},
      {"number_agreement", number_agreement},
      {"precedes", precedes},
      {"conjunction_between", conjunction_between},
  };
  return bases;
}

std::size_t word_count(std::string_view text) {
  std::size_t n = text.empty() ? 0 : 1;
  for (char c : text) n += c == ' ' ? 1 : 0;
  return n;
}

const std::map<std::string, EvaluatorFactory, std::less<>>& evaluator_bases() {
  static const std::map<std::string, EvaluatorFactory, std::less<>> bases = {
      {"constant",
       [](const ConstraintParams& p) -> EvaluatorFn {
         Valuation v{number_param(p, "value", 1.0), param(p, "algebra", "probabilistic")};
         return [v](const InstanceView&, const EvaluationContext&) { return v; };
       }},
      {"span_decay",
       [](const ConstraintParams& p) -> EvaluatorFn {
         const double rate = number_param(p, "rate", 0.9);
         const std::string algebra = param(p, "algebra", "probabilistic");
         return [rate, algebra](const InstanceView& view, const EvaluationContext&) {
           const std::size_t words = word_count(view.text);
           return Valuation{std::pow(rate, static_cast<double>(words > 0 ? words - 1 : 0)), algebra};
         };
       }},
  };
  return bases;
}

bool capitalized(std::string_view input, const Word& w) {
  return w.end > w.start && std::isupper(static_cast<unsigned char>(input[w.start]));
}

std::vector<HeuristicMatch> capitalized_runs(std::string_view input, std::span<const Word> words,
                                             std::size_t first) {
  std::vector<HeuristicMatch> out;
  for (std::size_t j = first; j < words.size() && capitalized(input, words[j]); ++j) {
    out.push_back({j, 1.0});
  }
  return out;
}

std::vector<HeuristicMatch> numeric_word(std::string_view input, std::span<const Word> words,
                                         std::size_t first) {
  if (first >= words.size()) return {};
  std::string_view w = input.substr(words[first].start, words[first].end - words[first].start);
  bool digit = false;
  for (char c : w) {
    if (std::isdigit(static_cast<unsigned char>(c))) {
      digit = true;
    } else if (c != '.' && c != ',') {
      return {};
    }
  }
  if (!digit) return {};
  return {{first, 1.0}};
}

}  // namespace

Registry Registry::with_builtins() {
  Registry r;
  for (const auto& [name, fn] : constraint_bases()) r.add_constraint(name, fn);
  for (const auto& [name, factory] : evaluator_bases()) r.add_evaluator(name, factory({}));
  r.add_heuristic("capitalized", capitalized_runs);
  r.add_heuristic("numeric", numeric_word);
  r.add_reference_scorer("distance_decay", std::make_shared<DistanceDecayScorer>());
  return r;
}

void Registry::add_constraint(std::string name, ConstraintFn fn) {
  if (constraints_.contains(name)) throw RegistryError("constraint '" + name + "' is already registered");
  constraints_.emplace(std::move(name), std::move(fn));
}

void Registry::add_evaluator(std::string name, EvaluatorFn fn) {
  if (evaluators_.contains(name)) throw RegistryError("evaluator '" + name + "' is already registered");
  evaluators_.emplace(std::move(name), std::move(fn));
}

void Registry::add_heuristic(std::string name, HeuristicFn fn) {
  if (heuristics_.contains(name)) throw RegistryError("heuristic '" + name + "' is already registered");
  heuristics_.emplace(std::move(name), std::move(fn));
}

void Registry::add_reference_scorer(std::string name, std::shared_ptr<const ReferenceScorer> scorer) {
  if (scorers_.contains(name)) throw RegistryError("reference scorer '" + name + "' is already registered");
  scorers_.emplace(std::move(name), std::move(scorer));
}

const ConstraintFn* Registry::constraint(std::string_view name) const {
  auto it = constraints_.find(name);
  return it == constraints_.end() ? nullptr : &it->second;
}

const EvaluatorFn* Registry::evaluator(std::string_view name) const {
  auto it = evaluators_.find(name);
  return it == evaluators_.end() ? nullptr : &it->second;
}

const HeuristicFn* Registry::heuristic(std::string_view name) const {
  auto it = heuristics_.find(name);
  return it == heuristics_.end() ? nullptr : &it->second;
}

std::shared_ptr<const ReferenceScorer> Registry::reference_scorer(std::string_view name) const {
  auto it = scorers_.find(name);
  return it == scorers_.end() ? nullptr : it->second;
}

void Registry::load_manifest(std::string_view document) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(document);
  } catch (const nlohmann::json::parse_error& e) {
    throw RegistryError(std::string("manifest: ") + e.what());
  }
  if (!doc.is_object()) throw RegistryError("manifest: top level must be an object");

  auto read_entries = [&](const char* key, auto&& add) {
    if (!doc.contains(key)) return;
    const auto& list = doc.at(key);
    if (!list.is_array()) throw RegistryError(std::string("manifest: '") + key + "' must be an array");
    for (const auto& entry : list) {
      if (!entry.is_object() || !entry.contains("name") || !entry.contains("base") ||
          !entry.at("name").is_string() || !entry.at("base").is_string()) {
        throw RegistryError(std::string("manifest: every '") + key + "' entry needs string name and base");
      }
      ConstraintParams params;
      if (entry.contains("params")) {
        for (const auto& [k, v] : entry.at("params").items()) {
          params[k] = v.is_string() ? v.template get<std::string>() : v.dump();
        }
      }
      add(entry.at("name").template get<std::string>(), entry.at("base").template get<std::string>(), params);
    }
  };
  for (const auto& [key, _] : doc.items()) {
    if (key != "constraints" && key != "evaluators") {
      throw RegistryError("manifest: unknown key '" + key + "'");
    }
  }

  read_entries("constraints", [&](const std::string& name, const std::string& base, ConstraintParams bound) {
    auto it = constraint_bases().find(base);
    if (it == constraint_bases().end()) throw RegistryError("manifest: unknown constraint base '" + base + "'");
    ConstraintFn fn = it->second;
    add_constraint(name, [fn, bound](const InstanceView& v, const ConstraintParams& site,
                                     const EvaluationContext& ctx) {
      return fn(v, merged(bound, site), ctx);
    });
  });
  read_entries("evaluators", [&](const std::string& name, const std::string& base, ConstraintParams bound) {
    auto it = evaluator_bases().find(base);
    if (it == evaluator_bases().end()) throw RegistryError("manifest: unknown evaluator base '" + base + "'");
    add_evaluator(name, it->second(bound));
  });
}

}  // namespace graphparse
