#pragma once

// Unpacked parse trees and best-first extraction from a packed forest.

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "graphparse/algebra.hpp"
#include "graphparse/forest.hpp"

namespace graphparse {

struct MemberChildren {
  std::string member;
  std::vector<std::size_t> children;  // instance ids, input order
  friend bool operator==(const MemberChildren&, const MemberChildren&) = default;
};

struct PendingReference {
  std::string member;
  std::size_t form = 0;  // instance id of the reference form occurrence
  friend bool operator==(const PendingReference&, const PendingReference&) = default;
};

struct ElementInstance {
  std::size_t id = 0;
  std::string element;
  Span span;
  std::size_t parent = npos;
  std::vector<std::size_t> children;    // every child, input order
  std::vector<MemberChildren> members;  // present members, declaration order
  std::optional<std::size_t> variant;   // alternatives
  std::optional<TokenCandidate> token;  // lexical elements
  std::vector<PendingReference> pending_references;
  Score score;  // element score
  friend bool operator==(const ElementInstance&, const ElementInstance&) = default;
};

// A complete tree. Instance ids are preorder positions.
struct ParseGraphCandidate {
  std::string text;
  std::vector<ElementInstance> instances;
  std::size_t root = 0;
  Score score;

  const ElementInstance& at(std::size_t id) const { return instances.at(id); }
  std::size_t depth(std::size_t id) const;
  InstanceView view(std::size_t id) const;
  // Stable textual form used to break score ties.
  std::string canonical() const;
  friend bool operator==(const ParseGraphCandidate&, const ParseGraphCandidate&) = default;
};

// Lazily unpacks a forest into trees in non-increasing score order.
class TreeEnumerator {
 public:
  TreeEnumerator(const ParseForest& forest, const ValuationAlgebra& algebra,
                 const Registry& registry, const AlgebraRegistry& algebras);
  ~TreeEnumerator();
  TreeEnumerator(TreeEnumerator&&) noexcept;
  TreeEnumerator& operator=(TreeEnumerator&&) noexcept;

  std::optional<ParseGraphCandidate> next();

 private:
  struct State;
  std::unique_ptr<State> state_;
};

// At most k trees, best first; ties ordered by canonical form. Throws
// std::invalid_argument for k == 0.
std::vector<ParseGraphCandidate> enumerate_graphs(const ParseForest& forest, std::size_t k,
                                                  const ValuationAlgebra& algebra,
                                                  const Registry& registry,
                                                  const AlgebraRegistry& algebras);

}  // namespace graphparse
