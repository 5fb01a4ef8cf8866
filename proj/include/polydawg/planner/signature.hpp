#pragma once

#include <string>
#include <vector>

#include "polydawg/bql/ast.hpp"

namespace polydawg {

/// Labeled ordered tree used as the literal-free operator skeleton of a query.
struct Skeleton {
  std::string label;
  std::vector<Skeleton> children;
  bool operator==(const Skeleton&) const = default;

  std::size_t size() const;
};

/// Canonical identity of a query. Two queries are the same signature when
/// their canonical texts are equal; matching between different signatures
/// ignores literals (see signature_distance).
struct Signature {
  std::string text;                  // canonical query text
  std::string structure;             // canonical text with literals replaced by '?'
  Skeleton skeleton;
  std::vector<std::string> islands;  // pre-order over island bodies
  std::vector<std::string> objects;  // catalog objects, sorted, unique
  std::vector<std::string> literals;

  bool operator==(const Signature& o) const { return text == o.text; }
};

Signature make_signature(const bql::IslandQuery& query);
Signature make_signature(const std::string& query_text);

/// Unit-cost ordered tree edit distance.
std::size_t tree_edit_distance(const Skeleton& a, const Skeleton& b);

/// 0.7 * tree edit distance / combined skeleton size + 0.3 * Jaccard distance
/// of the object sets. Lies in [0, 1].
double signature_distance(const Signature& a, const Signature& b);

inline constexpr double kSignatureMatchThreshold = 0.35;

}  // namespace polydawg
