#pragma once

#include <memory>

#include "polydawg/endpoint/loader.hpp"
#include "polydawg/polystore.hpp"

namespace testing {

inline constexpr const char* kLimit4 = "bdrel(select * from mimic2v26.d_patients limit 4)";
inline constexpr const char* kArrayFilter = "bdarray(filter(myarray,dim1>150))";
inline constexpr const char* kTextRange =
    "bdtext({ 'op' : 'scan', 'table' : 'mimic_logs', 'range' : { 'start' : ['r_0001','',''], "
    "'end' : ['r_0015','',''] } })";
inline constexpr const char* kCatalogObjects = "bdcatalog(objects)";
inline constexpr const char* kCastChain =
    "bdarray(\n  scan(\n    bdcast(\n      bdrel(SELECT poe_id, subject_id FROM "
    "mimic2v26.poe_order LIMIT 5)\n      , poe_order_copy\n      , "
    "'<subject_id:int32>[poe_id=0:*,10000000,0]'\n      , array)))";

/// Polystore with the demo dataset loaded, optionally plus relational replicas.
inline std::unique_ptr<polydawg::Polystore> demo_store(int replicas = 0, std::size_t workers = 4) {
  auto store = std::make_unique<polydawg::Polystore>(workers);
  polydawg::endpoint::load_demo_dataset(*store);
  for (int i = 0; i < replicas; ++i) {
    polydawg::endpoint::add_relational_replica(*store, "postgres" + std::to_string(i + 2));
  }
  return store;
}

}  // namespace testing
