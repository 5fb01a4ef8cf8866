#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

namespace polydawg {

/// Scalar types shared by the three data models. `Float` and `Double` both
/// hold a double at runtime; the distinction only survives in schemas.
enum class ScalarType { Bool, Int32, Int64, Float, Double, String };

std::string_view to_string(ScalarType type);

/// Parses canonical names plus the usual SQL synonyms (integer, bigint,
/// text, varchar, boolean, ...). Returns nullopt on anything else.
std::optional<ScalarType> parse_scalar_type(std::string_view name);

bool is_integer(ScalarType type);
bool is_numeric(ScalarType type);

struct Null {
  bool operator==(const Null&) const = default;
};

/// One scalar. Null exists only in the relational model.
class Value {
 public:
  using Storage = std::variant<Null, bool, std::int32_t, std::int64_t, double, std::string>;

  Value() = default;
  Value(bool v) : data_(v) {}
  Value(std::int32_t v) : data_(v) {}
  Value(std::int64_t v) : data_(v) {}
  Value(double v) : data_(v) {}
  Value(std::string v) : data_(std::move(v)) {}
  Value(const char* v) : data_(std::string(v)) {}

  static Value null() { return Value(); }

  bool is_null() const { return std::holds_alternative<Null>(data_); }
  bool is_bool() const { return std::holds_alternative<bool>(data_); }
  bool is_string() const { return std::holds_alternative<std::string>(data_); }
  bool is_integer() const {
    return std::holds_alternative<std::int32_t>(data_) ||
           std::holds_alternative<std::int64_t>(data_);
  }
  bool is_double() const { return std::holds_alternative<double>(data_); }
  bool is_numeric() const { return is_integer() || is_double(); }

  bool as_bool() const { return std::get<bool>(data_); }
  std::int64_t as_int64() const;
  double as_double() const;
  const std::string& as_string() const { return std::get<std::string>(data_); }

  /// Runtime type; nullopt for null.
  std::optional<ScalarType> type() const;

  const Storage& storage() const { return data_; }

  /// Exact structural equality (int32 5 != int64 5). Used for AST comparison.
  bool operator==(const Value&) const = default;

 private:
  Storage data_;
};

/// Equality with numeric promotion and null == null. Used for grouping,
/// DISTINCT and multiset comparisons.
bool same_value(const Value& a, const Value& b);

/// Total order used for sorting: numeric values by magnitude, strings
/// bytewise, false < true, null after everything. Values of incompatible
/// kinds order by kind.
std::weak_ordering order_values(const Value& a, const Value& b);

/// Hash consistent with same_value.
std::size_t hash_value(const Value& v);

/// Plain textual form: decimal integers, shortest round-trip doubles,
/// true/false, raw strings, empty for null.
std::string to_text(const Value& v);

/// Converts `v` to the runtime representation of `type`. Integer narrowing
/// is range-checked, double to integer requires an integral value, numeric
/// to string is refused. Throws Error(TypeError). Null passes through.
Value coerce(const Value& v, ScalarType type);

/// Parses `text` as a literal of `type` (used by CSV loading and casts).
Value parse_value(std::string_view text, ScalarType type);

struct ValueHash {
  std::size_t operator()(const Value& v) const { return hash_value(v); }
};

}  // namespace polydawg
