#pragma once

#include <cstddef>
#include <string>

namespace graphparse {

// Half-open character range [start, end) over the input text.
struct Span {
  std::size_t start = 0;
  std::size_t end = 0;

  std::size_t length() const { return end - start; }
  bool contains(const Span& other) const {
    return start <= other.start && other.end <= end;
  }
  bool disjoint(const Span& other) const {
    return end <= other.start || other.end <= start;
  }
  friend bool operator==(const Span&, const Span&) = default;
  friend auto operator<=>(const Span&, const Span&) = default;
};

inline std::string to_string(const Span& span) {
  return "[" + std::to_string(span.start) + "," + std::to_string(span.end) + ")";
}

}  // namespace graphparse
