#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include <nlohmann/json.hpp>

namespace ndb {

// Numbers parsed from decimal strings; integers stay exact, everything else
// falls back to double.
using NumericValue = std::variant<std::int64_t, double>;

std::optional<NumericValue> parse_numeric(std::string_view text);
std::string render_numeric(const NumericValue& value);
// Three-way comparison across the int/double split: -1, 0, or 1.
int compare_numeric(const NumericValue& a, const NumericValue& b);

// What a single support set contributes to a query: nothing, a truth value,
// an answer string, or a (key, value) pair feeding argmin/argmax/min/max.
struct IntermediateResult {
  enum class Kind { Null, Bool, Answer, Tuple };

  Kind kind = Kind::Null;
  bool truth = false;        // Kind::Bool
  std::string value;         // Kind::Answer payload, Kind::Tuple key
  std::string tuple_value;   // Kind::Tuple value, decimal text on the wire

  static IntermediateResult null() { return {}; }
  static IntermediateResult boolean(bool truth) {
    IntermediateResult r;
    r.kind = Kind::Bool;
    r.truth = truth;
    return r;
  }
  static IntermediateResult answer(std::string text) {
    IntermediateResult r;
    r.kind = Kind::Answer;
    r.value = std::move(text);
    return r;
  }
  static IntermediateResult tuple(std::string key, std::string value) {
    IntermediateResult r;
    r.kind = Kind::Tuple;
    r.value = std::move(key);
    r.tuple_value = std::move(value);
    return r;
  }

  bool operator==(const IntermediateResult&) const = default;

  bool is_null() const { return kind == Kind::Null; }
  // "NULL", "TRUE"/"FALSE", the answer text, or "(key, value)".
  std::string render() const;
};

// Wire/file form: {"kind":"null"} | {"kind":"bool","value":bool}
// | {"kind":"answer","value":string} | {"kind":"tuple","key":string,"value":string}.
nlohmann::json intermediate_to_json(const IntermediateResult& r);
IntermediateResult intermediate_from_json(const nlohmann::json& j);

}  // namespace ndb
