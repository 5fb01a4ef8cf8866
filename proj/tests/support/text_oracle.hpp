// Key-range predicate for text scans, evaluated component by component.
#pragma once

#include <string>

#include "polydawg/engines/text.hpp"

namespace oracle {

/// True when `k` lies on the inclusive side of bound `b`. Empty bound
/// components match anything.
inline bool text_bound_ok(const polydawg::TextKey& k, const polydawg::bql::TextBound& b,
                          bool lower) {
  const std::string parts[3] = {k.row, k.colfam, k.colqual};
  const std::string bound[3] = {b.row, b.colfam, b.colqual};
  for (int i = 0; i < 3; ++i) {
    if (bound[i].empty()) continue;
    if (parts[i] == bound[i]) continue;
    return lower ? parts[i] > bound[i] : parts[i] < bound[i];
  }
  return true;
}

}  // namespace oracle
