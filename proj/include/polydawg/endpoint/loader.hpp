#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "polydawg/polystore.hpp"

namespace polydawg::endpoint {

inline constexpr std::uint64_t kDemoSeed = 20160913;

struct LoadSummary {
  bool registered = false;                     // catalog entries were created
  std::map<std::string, std::size_t> objects;  // object name -> rows, cells or entries
};

/// Registers the demo engines, shims, casts and objects (unless the catalog
/// already holds them) and fills the engines with deterministic synthetic
/// data. Replica engines already in the catalog get copies of the relational
/// tables. Throws AlreadyLoaded when the data is present and `force` is unset.
LoadSummary load_demo_dataset(Polystore& store, bool force = false,
                              std::uint64_t seed = kDemoSeed);

/// Adds another relational engine with its own shim, casts to and from every
/// other shimmed engine, and copies of the demo relational tables. Returns
/// the new engine id.
int add_relational_replica(Polystore& store, const std::string& engine_name);

}  // namespace polydawg::endpoint
