#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "graphparse/error.hpp"
#include "graphparse/lexgraph.hpp"

namespace graphparse {

namespace {

std::string ascii_lower(std::string_view text) {
  std::string out(text);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

// Collapses runs of ASCII blanks to single spaces and trims the ends.
std::string normalise_spaces(std::string_view text) {
  std::string out;
  bool gap = false;
  for (char c : text) {
    if (c == ' ' || c == '\t') {
      gap = !out.empty();
      continue;
    }
    if (gap) out.push_back(' ');
    gap = false;
    out.push_back(c);
  }
  return out;
}

std::size_t count_words(std::string_view text) {
  return text.empty() ? 0 : static_cast<std::size_t>(std::count(text.begin(), text.end(), ' ')) + 1;
}

bool every_word_capitalised(std::string_view text) {
  bool at_word_start = true;
  for (char c : text) {
    if (c == ' ') {
      at_word_start = true;
      continue;
    }
    if (at_word_start && !std::isupper(static_cast<unsigned char>(c))) return false;
    at_word_start = false;
  }
  return true;
}

}  // namespace

Lexicon::Lexicon(std::vector<LexiconEntry> entries, LexiconOptions options)
    : entries_(std::move(entries)), options_(std::move(options)) {
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    LexiconEntry& e = entries_[i];
    e.lexeme = normalise_spaces(e.lexeme);
    if (e.lexeme.empty()) throw LexiconError(0, "entry " + std::to_string(i + 1) + " has an empty lexeme");
    if (e.frequency < 0) {
      throw LexiconError(0, "entry '" + e.lexeme + "' has a negative frequency");
    }
    std::string key = options_.policy == CasePolicy::fold ? ascii_lower(e.lexeme) : e.lexeme;
    auto& bucket = by_folded_[key];
    for (std::size_t j : bucket) {
      const LexiconEntry& other = entries_[j];
      if (other.word_class == e.word_class) {
        throw LexiconError(0, "duplicate entry '" + e.lexeme + "' / " + e.word_class);
      }
    }
    bucket.push_back(i);
    max_words_ = std::max(max_words_, count_words(e.lexeme));
  }
}

std::vector<const LexiconEntry*> Lexicon::lookup(std::string_view text) const {
  std::vector<const LexiconEntry*> out;
  const std::string normal = normalise_spaces(text);
  const bool exact = options_.policy == CasePolicy::exact;
  auto it = by_folded_.find(exact ? normal : ascii_lower(normal));
  if (it == by_folded_.end()) return out;
  for (std::size_t i : it->second) {
    const LexiconEntry& e = entries_[i];
    if (!exact && options_.case_sensitive_classes.contains(e.word_class) &&
        !every_word_capitalised(normal)) {
      continue;
    }
    out.push_back(&e);
  }
  return out;
}

Lexicon load_lexicon(std::string_view document, LexiconOptions options) {
  std::vector<LexiconEntry> entries;
  std::map<std::pair<std::string, std::string>, std::size_t> seen;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= document.size()) {
    std::size_t nl = document.find('\n', pos);
    if (nl == std::string_view::npos) nl = document.size();
    std::string_view line = document.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;
    if (line.find_first_not_of(" \t") == std::string_view::npos) continue;

    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
      std::size_t tab = line.find('\t', start);
      fields.push_back(line.substr(start, tab == std::string_view::npos ? std::string_view::npos : tab - start));
      if (tab == std::string_view::npos) break;
      start = tab + 1;
    }
    if (fields.size() != 3) {
      throw LexiconError(line_no, "expected lexeme<TAB>class<TAB>frequency, got " +
                                      std::to_string(fields.size()) + " fields");
    }
    LexiconEntry entry;
    entry.lexeme = normalise_spaces(fields[0]);
    entry.word_class = normalise_spaces(fields[1]);
    if (entry.lexeme.empty()) throw LexiconError(line_no, "empty lexeme");
    if (entry.word_class.empty()) throw LexiconError(line_no, "empty word class");
    std::string_view freq = fields[2];
    while (!freq.empty() && (freq.back() == ' ' || freq.back() == '\t')) freq.remove_suffix(1);
    while (!freq.empty() && freq.front() == ' ') freq.remove_prefix(1);
    auto [end, ec] = std::from_chars(freq.data(), freq.data() + freq.size(), entry.frequency);
    if (ec != std::errc() || end != freq.data() + freq.size() || freq.empty()) {
      throw LexiconError(line_no, "frequency '" + std::string(freq) + "' is not an integer");
    }
    if (entry.frequency < 0) throw LexiconError(line_no, "negative frequency");
    std::string key = options.policy == CasePolicy::fold ? ascii_lower(entry.lexeme) : entry.lexeme;
    auto [it, fresh] = seen.emplace(std::make_pair(key, entry.word_class), line_no);
    if (!fresh) {
      throw LexiconError(line_no, "duplicate entry '" + entry.lexeme + "' / " + entry.word_class +
                                      " (first on line " + std::to_string(it->second) + ")");
    }
    entries.push_back(std::move(entry));
  }
  return Lexicon(std::move(entries), std::move(options));
}

Lexicon load_lexicon_file(const std::string& path, LexiconOptions options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LexiconError(0, "cannot read lexicon '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return load_lexicon(buffer.str(), std::move(options));
}

Lexicon OnlineLexiconProvider::load() const {
  throw LexiconError(0, "online lexicon sources are not supported (endpoint '" + endpoint_ + "')");
}

std::map<std::string, double> pos_distribution(const Lexicon& lexicon, std::string_view lexeme,
                                               const std::vector<std::string>& open) {
  std::map<std::string, double> out;
  const auto entries = lexicon.lookup(lexeme);
  if (entries.empty()) {
    for (const auto& c : open) out[c] = 1.0 / static_cast<double>(open.size());
    return out;
  }
  std::int64_t total = 0;
  for (const auto* e : entries) total += e->frequency;
  if (total == 0) throw LexiconError(0, "degenerate lexeme '" + std::string(lexeme) + "'");
  for (const auto* e : entries) {
    out[e->word_class] += static_cast<double>(e->frequency) / static_cast<double>(total);
  }
  return out;
}

std::vector<std::string> open_classes(const LanguageModel& model) {
  std::vector<std::string> out;
  for (const auto& e : model.elements) {
    if (e.kind != ElementKind::lexical || !e.pattern || !e.pattern->open) continue;
    if (e.pattern->strategy != PatternStrategy::lexicon || !e.pattern->lexicon_class) continue;
    if (std::find(out.begin(), out.end(), *e.pattern->lexicon_class) == out.end()) {
      out.push_back(*e.pattern->lexicon_class);
    }
  }
  return out;
}

}  // namespace graphparse
