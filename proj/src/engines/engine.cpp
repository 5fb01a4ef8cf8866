#include "polydawg/engines/engine.hpp"

#include "polydawg/engines/array.hpp"
#include "polydawg/engines/relational.hpp"
#include "polydawg/engines/text.hpp"

namespace polydawg::engines {

const std::string& physical_name(const Bindings& bindings, const std::string& name) {
  auto it = bindings.find(name);
  return it == bindings.end() ? name : it->second;
}

std::unique_ptr<StorageEngine> make_engine(bql::Island island) {
  switch (island) {
    case bql::Island::Relational: return std::make_unique<RelationalEngine>();
    case bql::Island::Array: return std::make_unique<ArrayEngine>();
    case bql::Island::Text: break;
  }
  return std::make_unique<TextEngine>();
}

}  // namespace polydawg::engines
