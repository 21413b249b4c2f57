#pragma once

// Lexicons and the lexical analysis graph: every overlapping token reading
// of the input with its part-of-speech probability.

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "graphparse/model.hpp"
#include "graphparse/registry.hpp"
#include "graphparse/span.hpp"

namespace graphparse {

enum class CasePolicy { fold, exact };

struct LexiconEntry {
  std::string lexeme;
  std::string word_class;
  std::int64_t frequency = 0;
  friend bool operator==(const LexiconEntry&, const LexiconEntry&) = default;
};

struct LexiconOptions {
  CasePolicy policy = CasePolicy::fold;
  // Under folding, these classes only match words written with an initial
  // capital.
  std::set<std::string> case_sensitive_classes = {"ProperNoun"};
};

class Lexicon {
 public:
  Lexicon() = default;
  Lexicon(std::vector<LexiconEntry> entries, LexiconOptions options = {});

  const std::vector<LexiconEntry>& entries() const { return entries_; }
  const LexiconOptions& options() const { return options_; }
  std::size_t max_words() const { return max_words_; }

  // Entries whose lexeme matches `text` (words separated by single spaces)
  // under the case policy.
  std::vector<const LexiconEntry*> lookup(std::string_view text) const;

 private:
  std::vector<LexiconEntry> entries_;
  LexiconOptions options_;
  std::map<std::string, std::vector<std::size_t>> by_folded_;
  std::size_t max_words_ = 0;
};

// Parses the TSV lexicon format. Throws LexiconError.
Lexicon load_lexicon(std::string_view document, LexiconOptions options = {});
Lexicon load_lexicon_file(const std::string& path, LexiconOptions options = {});

// Where a lexicon comes from. The toolkit ships document and file sources;
// an online dictionary client would be another implementation.
class LexiconProvider {
 public:
  virtual ~LexiconProvider() = default;
  virtual Lexicon load() const = 0;
};

class DocumentLexiconProvider final : public LexiconProvider {
 public:
  explicit DocumentLexiconProvider(std::string document, LexiconOptions options = {})
      : document_(std::move(document)), options_(std::move(options)) {}
  Lexicon load() const override { return load_lexicon(document_, options_); }

 private:
  std::string document_;
  LexiconOptions options_;
};

class FileLexiconProvider final : public LexiconProvider {
 public:
  explicit FileLexiconProvider(std::string path, LexiconOptions options = {})
      : path_(std::move(path)), options_(std::move(options)) {}
  Lexicon load() const override { return load_lexicon_file(path_, options_); }

 private:
  std::string path_;
  LexiconOptions options_;
};

// Placeholder for a dictionary service; always throws LexiconError since
// this build makes no network requests.
class OnlineLexiconProvider final : public LexiconProvider {
 public:
  explicit OnlineLexiconProvider(std::string endpoint) : endpoint_(std::move(endpoint)) {}
  Lexicon load() const override;

 private:
  std::string endpoint_;
};

// P(class | lexeme). Unknown lexemes get a uniform distribution over
// `open_classes`; a known lexeme whose frequencies are all zero throws
// LexiconError("degenerate lexeme").
std::map<std::string, double> pos_distribution(const Lexicon& lexicon, std::string_view lexeme,
                                               const std::vector<std::string>& open_classes);

// Lexicon classes of the model's lexical elements flagged open.
std::vector<std::string> open_classes(const LanguageModel& model);

struct TokenCandidate {
  std::size_t id = 0;
  std::string element;
  Span span;
  std::string lexeme;
  double pos_prob = 1.0;
  friend bool operator==(const TokenCandidate&, const TokenCandidate&) = default;
};

struct LexicalAnalysisGraph {
  std::string input;
  std::vector<Word> words;  // maximal non-whitespace runs
  std::vector<TokenCandidate> tokens;  // sorted by (start, end, element order)
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  std::vector<std::size_t> start_tokens;
  std::vector<std::size_t> end_tokens;

  std::vector<std::size_t> successors(std::size_t token) const;
  friend bool operator==(const LexicalAnalysisGraph&, const LexicalAnalysisGraph&) = default;
};

// Unicode whitespace length at byte `offset` of UTF-8 text (0 if none).
std::size_t whitespace_length(std::string_view text, std::size_t offset);
std::vector<Word> split_words(std::string_view text);

// Emits every match of every lexical element at every word boundary.
// Throws ScanError for input covered by no candidate.
LexicalAnalysisGraph scan(std::string_view input, const LanguageModel& model,
                          const Lexicon& lexicon, const Registry& registry);
LexicalAnalysisGraph scan(std::string_view input, const LanguageModel& model,
                          const Lexicon& lexicon);

// Number of complete start-to-end token paths. Throws std::overflow_error
// past 2^64 - 1.
std::uint64_t count_sequences(const LexicalAnalysisGraph& graph);

}  // namespace graphparse
