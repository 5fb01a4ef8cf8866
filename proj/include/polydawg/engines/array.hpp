#pragma once

#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "polydawg/bql/ast.hpp"
#include "polydawg/engines/data.hpp"
#include "polydawg/engines/engine.hpp"

namespace polydawg::engines {

using ArrayLookup = std::function<std::shared_ptr<const ArrayObject>(const std::string&)>;

/// Evaluates an array operator tree.
///   scan        identity
///   project     keeps the listed attributes, in the listed order
///   filter      keeps cells whose predicate (over dimensions and attributes) is true
///   aggregate   one cell per distinct group-dimension tuple; ungrouped input
///               yields a single cell at i=0 (no cells for an empty input)
///   apply       appends computed attributes
///   cross_join  pairs cells agreeing on the listed dimension pairs; result
///               dimensions are the left ones followed by the unpaired right ones
///   redimension moves values between attribute and dimension roles by name
///   sort        dense 1-D array over `n`, cells ordered by the listed
///               attributes (all attributes when none are listed), ties in
///               coordinate order
ArrayObject evaluate_array(const bql::ArrayExpr& expr, const ArrayLookup& lookup);

/// Throws SchemaSyntaxError/DuplicateName/BadBounds for malformed schemas.
void validate_schema(const bql::ArraySchema& schema);

/// Checks one cell against `schema` and converts attribute values to the
/// attribute types. Throws OutOfBounds and TypeError (including for nulls).
Row conform_cell(const bql::ArraySchema& schema, const Coordinates& coords, const Row& attrs);

class ArrayEngine final : public StorageEngine {
 public:
  ArrayEngine() : arrays_(ErrorCode::UnknownArray) {}

  bql::Island island() const override { return bql::Island::Array; }

  void create_array(const std::string& name, bql::ArraySchema schema);
  /// Writes cells; an existing cell at the same coordinates is overwritten.
  void write_cells(const std::string& name, const std::vector<std::pair<Coordinates, Row>>& cells);
  std::shared_ptr<const ArrayObject> array(const std::string& name) const;

  ArrayObject evaluate(const bql::ArrayExpr& expr, const Bindings& bindings = {}) const;

  ResultSet execute(const bql::IslandQuery& query, const Bindings& bindings) const override;
  ResultSet read_object(const std::string& name) const override;
  void write_object(const std::string& name, ResultSet data, bool replace) override;
  bool has_object(const std::string& name) const override { return arrays_.contains(name); }
  bool drop_object(const std::string& name) override { return arrays_.erase(name); }
  std::vector<std::string> object_names() const override { return arrays_.names(); }
  std::size_t object_size(const std::string& name) const override;

 private:
  ObjectStore<ArrayObject> arrays_;
};

}  // namespace polydawg::engines
