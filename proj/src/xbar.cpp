#include "graphparse/xbar.hpp"

#include <cstdio>
#include <map>
#include <sstream>

#include "graphparse/error.hpp"

namespace graphparse {

BundleSources BundleSources::embedded() {
  return {bundle_data::model, bundle_data::lexicon, bundle_data::corpus, bundle_data::lock};
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

namespace {

std::map<std::string, std::string> read_lock(std::string_view lock) {
  std::map<std::string, std::string> out;
  std::istringstream in{std::string(lock)};
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line.front() == '#') continue;
    std::istringstream fields(line);
    std::string algo, hex, path;
    if (!(fields >> algo >> hex >> path) || algo != "fnv1a64") {
      throw BundleError("malformed bundle lock line: " + line);
    }
    out[path] = hex;
  }
  return out;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace

EnglishModel build_english_model() { return build_english_model(BundleSources::embedded()); }

EnglishModel build_english_model(const BundleSources& sources) {
  const auto lock = read_lock(sources.lock);
  const std::pair<const char*, std::string_view> files[] = {
      {"models/xbar.model.json", sources.model},
      {"lexicons/english.tsv", sources.lexicon},
      {"corpora/demo_sentences.txt", sources.corpus},
  };
  for (const auto& [path, bytes] : files) {
    auto it = lock.find(path);
    if (it == lock.end()) throw BundleError(std::string("bundle lock has no entry for ") + path);
    if (it->second != hex64(fnv1a64(bytes))) {
      throw BundleError(std::string("checksum mismatch for ") + path);
    }
  }

  EnglishModel out;
  try {
    out.model = load_model(sources.model);
    out.lexicon = load_lexicon(sources.lexicon);
  } catch (const ModelLoadError& e) {
    throw BundleError(std::string("bundled model: ") + e.what());
  } catch (const LexiconError& e) {
    throw BundleError(std::string("bundled lexicon: ") + e.what());
  }
  const auto diagnostics = validate_model(out.model);
  for (const auto& d : diagnostics) {
    if (d.severity == Severity::error) throw BundleError("bundled model: " + d.path + ": " + d.message);
  }
  // Every lexicon-backed element needs rows unless it is an open class.
  for (const auto& e : out.model.elements) {
    if (e.kind != ElementKind::lexical || !e.pattern || e.pattern->open) continue;
    if (e.pattern->strategy != PatternStrategy::lexicon) continue;
    bool found = false;
    for (const auto& row : out.lexicon.entries()) found = found || row.word_class == e.pattern->lexicon_class;
    if (!found) throw BundleError("bundled lexicon has no rows for " + e.name);
  }
  return out;
}

std::vector<std::string> corpus_sentences(std::string_view corpus) {
  std::vector<std::string> out;
  std::istringstream in{std::string(corpus)};
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    out.push_back(line);
  }
  return out;
}

const Pipeline& english_pipeline() {
  static const Pipeline pipeline = [] {
    EnglishModel english = build_english_model();
    return Pipeline(std::move(english.model), std::move(english.lexicon));
  }();
  return pipeline;
}

Analysis demo_parse(std::string_view sentence, std::size_t k) {
  return english_pipeline().analyze(sentence, k);
}

}  // namespace graphparse
