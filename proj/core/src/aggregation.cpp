#include "ndb/aggregation.hpp"

#include <algorithm>
#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <vector>

#include "ndb/errors.hpp"
#include "ndb/text.hpp"

namespace ndb {

std::optional<NumericValue> parse_numeric(std::string_view text) {
  if (text.empty()) return std::nullopt;
  const std::string buf(text);

  errno = 0;
  char* end = nullptr;
  const long long as_int = std::strtoll(buf.c_str(), &end, 10);
  if (errno == 0 && end == buf.c_str() + buf.size()) {
    return NumericValue{static_cast<std::int64_t>(as_int)};
  }

  errno = 0;
  end = nullptr;
  const double as_double = std::strtod(buf.c_str(), &end);
  if (errno == 0 && end == buf.c_str() + buf.size()) {
    return NumericValue{as_double};
  }
  return std::nullopt;
}

std::string render_numeric(const NumericValue& value) {
  if (std::holds_alternative<std::int64_t>(value)) {
    return std::to_string(std::get<std::int64_t>(value));
  }
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", std::get<double>(value));
  return buf;
}

int compare_numeric(const NumericValue& a, const NumericValue& b) {
  if (std::holds_alternative<std::int64_t>(a) && std::holds_alternative<std::int64_t>(b)) {
    const auto x = std::get<std::int64_t>(a), y = std::get<std::int64_t>(b);
    return x < y ? -1 : (x > y ? 1 : 0);
  }
  const auto widen = [](const NumericValue& v) -> long double {
    if (std::holds_alternative<std::int64_t>(v)) return std::get<std::int64_t>(v);
    return std::get<double>(v);
  };
  const long double x = widen(a), y = widen(b);
  return x < y ? -1 : (x > y ? 1 : 0);
}

std::string IntermediateResult::render() const {
  switch (kind) {
    case Kind::Null: return "NULL";
    case Kind::Bool: return truth ? "TRUE" : "FALSE";
    case Kind::Answer: return value;
    case Kind::Tuple: return "(" + value + ", " + tuple_value + ")";
  }
  return "NULL";
}

nlohmann::json intermediate_to_json(const IntermediateResult& r) {
  switch (r.kind) {
    case IntermediateResult::Kind::Null: return {{"kind", "null"}};
    case IntermediateResult::Kind::Bool: return {{"kind", "bool"}, {"value", r.truth}};
    case IntermediateResult::Kind::Answer: return {{"kind", "answer"}, {"value", r.value}};
    case IntermediateResult::Kind::Tuple:
      return {{"kind", "tuple"}, {"key", r.value}, {"value", r.tuple_value}};
  }
  return {{"kind", "null"}};
}

IntermediateResult intermediate_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string()) {
    raise(ErrorCode::ProtocolError, "intermediate result needs a string kind");
  }
  const std::string kind = j["kind"].get<std::string>();
  if (kind == "null") return IntermediateResult::null();
  if (kind == "bool") {
    if (!j.contains("value") || !j["value"].is_boolean()) {
      raise(ErrorCode::ProtocolError, "bool intermediate needs a boolean value");
    }
    return IntermediateResult::boolean(j["value"].get<bool>());
  }
  if (kind == "answer") {
    if (!j.contains("value") || !j["value"].is_string()) {
      raise(ErrorCode::ProtocolError, "answer intermediate needs a string value");
    }
    return IntermediateResult::answer(j["value"].get<std::string>());
  }
  if (kind == "tuple") {
    if (!j.contains("key") || !j["key"].is_string() || !j.contains("value") ||
        !j["value"].is_string()) {
      raise(ErrorCode::ProtocolError, "tuple intermediate needs string key and value");
    }
    return IntermediateResult::tuple(j["key"].get<std::string>(), j["value"].get<std::string>());
  }
  raise(ErrorCode::ProtocolError, "unknown intermediate kind " + kind);
}

std::string_view to_string(AggregationFunction fn) {
  switch (fn) {
    case AggregationFunction::NoAggregation: return "no_aggregation";
    case AggregationFunction::Count: return "count";
    case AggregationFunction::Min: return "min";
    case AggregationFunction::Max: return "max";
    case AggregationFunction::ArgMin: return "argmin";
    case AggregationFunction::ArgMax: return "argmax";
  }
  return "no_aggregation";
}

std::optional<AggregationFunction> aggregation_from_string(std::string_view label) {
  if (label == "no_aggregation") return AggregationFunction::NoAggregation;
  if (label == "count") return AggregationFunction::Count;
  if (label == "min") return AggregationFunction::Min;
  if (label == "max") return AggregationFunction::Max;
  if (label == "argmin") return AggregationFunction::ArgMin;
  if (label == "argmax") return AggregationFunction::ArgMax;
  return std::nullopt;
}

AggregationFunction classify_query(std::string_view query) {
  const std::vector<std::string> tokens = tokenize(query);
  for (std::size_t i = 0; i + 1 < tokens.size(); ++i) {
    if (tokens[i] == "how" && tokens[i + 1] == "many") return AggregationFunction::Count;
  }

  static const std::set<std::string> min_words = {"oldest", "earliest", "smallest", "lowest",
                                                  "fewest", "least",    "minimum"};
  static const std::set<std::string> max_words = {"youngest", "newest",  "latest",  "largest",
                                                  "highest",  "biggest", "most",    "greatest",
                                                  "maximum"};
  const bool arg_lead =
      !tokens.empty() && (tokens.front() == "who" || tokens.front() == "which" ||
                          tokens.front() == "whom" || tokens.front() == "whose");
  for (const auto& t : tokens) {
    if (min_words.count(t)) {
      return arg_lead ? AggregationFunction::ArgMin : AggregationFunction::Min;
    }
    if (max_words.count(t)) {
      return arg_lead ? AggregationFunction::ArgMax : AggregationFunction::Max;
    }
  }
  return AggregationFunction::NoAggregation;
}

AnswerSet AnswerSet::of(std::set<std::string> values) {
  if (values.empty()) return null();
  if (values.size() > 1 && values.count(std::string(kNullMarker))) {
    raise(ErrorCode::InvalidArgument, "NULL cannot appear alongside answers");
  }
  AnswerSet out;
  out.values = std::move(values);
  return out;
}

std::string AnswerSet::render() const {
  std::string out = "{";
  bool first = true;
  for (const auto& v : values) {
    if (!first) out += ", ";
    first = false;
    out += "\"" + v + "\"";
  }
  out += "}";
  return out;
}

namespace {

NumericValue tuple_numeric(const IntermediateResult& item) {
  if (item.kind != IntermediateResult::Kind::Tuple) {
    raise(ErrorCode::TypeMismatch,
          "extremum aggregation needs tuple inputs, got " + item.render());
  }
  const auto parsed = parse_numeric(item.tuple_value);
  if (!parsed) {
    raise(ErrorCode::TypeMismatch, "non-numeric tuple value " + item.tuple_value);
  }
  return *parsed;
}

std::string render_for_counting(const IntermediateResult& item) {
  // Tuples contribute their key so that count composes with grouped results.
  if (item.kind == IntermediateResult::Kind::Tuple) return item.value;
  return item.render();
}

}  // namespace

AnswerSet aggregate(AggregationFunction fn, std::span<const IntermediateResult> items) {
  std::vector<const IntermediateResult*> live;
  live.reserve(items.size());
  for (const auto& item : items) {
    if (!item.is_null()) live.push_back(&item);
  }

  if (live.empty()) {
    if (fn == AggregationFunction::Count) return AnswerSet::of({"0"});
    return AnswerSet::null();
  }

  switch (fn) {
    case AggregationFunction::NoAggregation: {
      std::set<std::string> out;
      for (const auto* item : live) out.insert(render_for_counting(*item));
      return AnswerSet::of(std::move(out));
    }
    case AggregationFunction::Count: {
      std::set<std::string> distinct;
      for (const auto* item : live) distinct.insert(render_for_counting(*item));
      return AnswerSet::of({std::to_string(distinct.size())});
    }
    case AggregationFunction::Min:
    case AggregationFunction::Max: {
      const int want = fn == AggregationFunction::Min ? -1 : 1;
      NumericValue best = tuple_numeric(*live.front());
      for (std::size_t i = 1; i < live.size(); ++i) {
        const NumericValue v = tuple_numeric(*live[i]);
        if (compare_numeric(v, best) == want) best = v;
      }
      return AnswerSet::of({render_numeric(best)});
    }
    case AggregationFunction::ArgMin:
    case AggregationFunction::ArgMax: {
      const int want = fn == AggregationFunction::ArgMin ? -1 : 1;
      NumericValue best = tuple_numeric(*live.front());
      for (std::size_t i = 1; i < live.size(); ++i) {
        const NumericValue v = tuple_numeric(*live[i]);
        if (compare_numeric(v, best) == want) best = v;
      }
      std::set<std::string> keys;
      for (const auto* item : live) {
        if (compare_numeric(tuple_numeric(*item), best) == 0) keys.insert(item->value);
      }
      return AnswerSet::of(std::move(keys));
    }
  }
  return AnswerSet::null();
}

}  // namespace ndb
