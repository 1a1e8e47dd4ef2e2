#pragma once

#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>

#include "ndb/intermediate.hpp"

namespace ndb {

enum class AggregationFunction { NoAggregation, Count, Min, Max, ArgMin, ArgMax };

// Wire labels: no_aggregation, count, min, max, argmin, argmax.
std::string_view to_string(AggregationFunction fn);
std::optional<AggregationFunction> aggregation_from_string(std::string_view label);

// Keyword-driven routing over the query surface form. "how many" wins over
// extremum keywords; extremum keywords map to the arg-form when the question
// leads with who/which/whom/whose and to plain min/max otherwise.
AggregationFunction classify_query(std::string_view query);

// A query answer: either the NULL marker alone or a non-empty set of values.
struct AnswerSet {
  std::set<std::string> values;

  static AnswerSet null() { return AnswerSet{{std::string(kNullMarker)}}; }
  static AnswerSet of(std::set<std::string> values);

  bool is_null() const { return values.size() == 1 && *values.begin() == kNullMarker; }
  bool operator==(const AnswerSet&) const = default;
  // {"a", "b"} with elements in sorted order.
  std::string render() const;

  static constexpr std::string_view kNullMarker = "NULL";
};

// Classical reduction of per-support-set intermediates into the final answer.
// Nulls are dropped first. Empty input yields {"0"} under count and NULL
// otherwise. count is distinct cardinality; min/max/argmin/argmax require
// numeric tuple values and throw TypeMismatch otherwise; argmin/argmax keep
// every key attaining the extreme.
AnswerSet aggregate(AggregationFunction fn, std::span<const IntermediateResult> items);

}  // namespace ndb
