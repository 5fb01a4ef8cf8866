#include "polydawg/value.hpp"

#include <charconv>
#include <cmath>
#include <functional>
#include <limits>

#include "polydawg/error.hpp"
#include "polydawg/text_util.hpp"

namespace polydawg {

std::string_view to_string(ScalarType type) {
  switch (type) {
    case ScalarType::Bool: return "bool";
    case ScalarType::Int32: return "int32";
    case ScalarType::Int64: return "int64";
    case ScalarType::Float: return "float";
    case ScalarType::Double: return "double";
    case ScalarType::String: return "string";
  }
  return "?";
}

std::optional<ScalarType> parse_scalar_type(std::string_view name) {
  const std::string n = to_lower(name);
  if (n == "bool" || n == "boolean") return ScalarType::Bool;
  if (n == "int32" || n == "int" || n == "integer" || n == "int4") return ScalarType::Int32;
  if (n == "int64" || n == "bigint" || n == "int8") return ScalarType::Int64;
  if (n == "float" || n == "real" || n == "float4") return ScalarType::Float;
  if (n == "double" || n == "float8" || n == "numeric") return ScalarType::Double;
  if (n == "string" || n == "text" || n == "varchar" || n == "char") return ScalarType::String;
  return std::nullopt;
}

bool is_integer(ScalarType type) {
  return type == ScalarType::Int32 || type == ScalarType::Int64;
}

bool is_numeric(ScalarType type) {
  return is_integer(type) || type == ScalarType::Float || type == ScalarType::Double;
}

std::int64_t Value::as_int64() const {
  if (auto* v = std::get_if<std::int32_t>(&data_)) return *v;
  return std::get<std::int64_t>(data_);
}

double Value::as_double() const {
  if (auto* v = std::get_if<double>(&data_)) return *v;
  return static_cast<double>(as_int64());
}

std::optional<ScalarType> Value::type() const {
  switch (data_.index()) {
    case 1: return ScalarType::Bool;
    case 2: return ScalarType::Int32;
    case 3: return ScalarType::Int64;
    case 4: return ScalarType::Double;
    case 5: return ScalarType::String;
    default: return std::nullopt;
  }
}

namespace {

int kind_rank(const Value& v) {
  if (v.is_bool()) return 0;
  if (v.is_numeric()) return 1;
  if (v.is_string()) return 2;
  return 3;
}

}  // namespace

bool same_value(const Value& a, const Value& b) {
  if (a.is_null() || b.is_null()) return a.is_null() && b.is_null();
  return order_values(a, b) == std::weak_ordering::equivalent;
}

std::weak_ordering order_values(const Value& a, const Value& b) {
  const int ka = kind_rank(a);
  const int kb = kind_rank(b);
  if (ka != kb) return ka <=> kb;
  switch (ka) {
    case 0: return a.as_bool() <=> b.as_bool();
    case 1:
      if (a.is_integer() && b.is_integer()) return a.as_int64() <=> b.as_int64();
      {
        const double x = a.as_double();
        const double y = b.as_double();
        if (x < y) return std::weak_ordering::less;
        if (x > y) return std::weak_ordering::greater;
        return std::weak_ordering::equivalent;
      }
    case 2: return a.as_string().compare(b.as_string()) <=> 0;
    default: return std::weak_ordering::equivalent;
  }
}

std::size_t hash_value(const Value& v) {
  if (v.is_null()) return 0x9e3779b97f4a7c15ULL;
  if (v.is_bool()) return std::hash<bool>{}(v.as_bool()) + 17;
  if (v.is_integer()) return std::hash<std::int64_t>{}(v.as_int64());
  if (v.is_double()) {
    const double d = v.as_double();
    if (d == std::trunc(d) && std::abs(d) < 9.2e18) {
      return std::hash<std::int64_t>{}(static_cast<std::int64_t>(d));
    }
    return std::hash<double>{}(d);
  }
  return std::hash<std::string>{}(v.as_string());
}

std::string to_text(const Value& v) {
  if (v.is_null()) return {};
  if (v.is_bool()) return v.as_bool() ? "true" : "false";
  if (v.is_integer()) return std::to_string(v.as_int64());
  if (v.is_double()) return format_double(v.as_double());
  return v.as_string();
}

Value coerce(const Value& v, ScalarType type) {
  if (v.is_null()) return v;
  switch (type) {
    case ScalarType::Bool:
      if (v.is_bool()) return v;
      break;
    case ScalarType::Int32:
    case ScalarType::Int64: {
      std::int64_t i = 0;
      if (v.is_integer()) {
        i = v.as_int64();
      } else if (v.is_double()) {
        const double d = v.as_double();
        if (d != std::trunc(d) || std::abs(d) > 9.2e18) break;
        i = static_cast<std::int64_t>(d);
      } else {
        break;
      }
      if (type == ScalarType::Int64) return Value(i);
      if (i < std::numeric_limits<std::int32_t>::min() ||
          i > std::numeric_limits<std::int32_t>::max()) {
        throw Error(ErrorCode::TypeError, "value " + std::to_string(i) + " out of int32 range");
      }
      return Value(static_cast<std::int32_t>(i));
    }
    case ScalarType::Float:
    case ScalarType::Double:
      if (v.is_numeric()) return Value(v.as_double());
      break;
    case ScalarType::String:
      if (v.is_string()) return v;
      break;
  }
  throw Error(ErrorCode::TypeError,
              "cannot convert '" + to_text(v) + "' to " + std::string(to_string(type)));
}

Value parse_value(std::string_view text, ScalarType type) {
  auto fail = [&]() -> Value {
    throw Error(ErrorCode::TypeError,
                "cannot parse '" + std::string(text) + "' as " + std::string(to_string(type)));
  };
  switch (type) {
    case ScalarType::Bool: {
      const std::string t = to_lower(text);
      if (t == "true" || t == "t") return Value(true);
      if (t == "false" || t == "f") return Value(false);
      return fail();
    }
    case ScalarType::Int32:
    case ScalarType::Int64: {
      std::int64_t out = 0;
      auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
      if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) return fail();
      return coerce(Value(out), type);
    }
    case ScalarType::Float:
    case ScalarType::Double: {
      double out = 0;
      auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
      if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) return fail();
      return Value(out);
    }
    case ScalarType::String:
      return Value(std::string(text));
  }
  return fail();
}

}  // namespace polydawg
