#pragma once

// The bundled X-bar general language model and its English instantiation.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "graphparse/lexgraph.hpp"
#include "graphparse/model.hpp"
#include "graphparse/pipeline.hpp"

namespace graphparse {

namespace bundle_data {
extern const std::string_view model;
extern const std::string_view lexicon;
extern const std::string_view corpus;
extern const std::string_view lock;
}  // namespace bundle_data

struct BundleSources {
  std::string_view model;
  std::string_view lexicon;
  std::string_view corpus;
  std::string_view lock;  // "fnv1a64 <hex> <path>" lines

  static BundleSources embedded();
};

std::uint64_t fnv1a64(std::string_view bytes);

struct EnglishModel {
  LanguageModel model;
  Lexicon lexicon;
};

// Loads, checksums and validates the bundle. Throws BundleError on a
// checksum mismatch or error-severity diagnostics.
EnglishModel build_english_model();
EnglishModel build_english_model(const BundleSources& sources);

// Non-comment, non-blank lines of a corpus document.
std::vector<std::string> corpus_sentences(std::string_view corpus);

// Shared pipeline over the embedded English model.
const Pipeline& english_pipeline();

Analysis demo_parse(std::string_view sentence, std::size_t k);

}  // namespace graphparse
