#include "polydawg/polystore.hpp"

namespace polydawg {

Polystore::Polystore(std::size_t workers)
    : migrator_(catalog_, registry_),
      executor_(catalog_, registry_, migrator_, monitor_, workers),
      planner_(catalog_, executor_, monitor_) {
  monitor_.set_runner([this](const Signature& sig, std::size_t index) {
    return planner_.run_plan(sig, index);
  });
}

void Polystore::save(const std::string& path) const {
  catalog_.persist(path, {monitor_.serialize()});
}

void Polystore::open(const std::string& path) {
  for (const auto& section : catalog_.load(path)) {
    if (section.name == monitor::kMonitorSection) monitor_.deserialize(section);
  }
  attach_engines();
}

}  // namespace polydawg
