#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "ndb/aggregation.hpp"
#include "ndb/fact_store.hpp"

namespace ndb {

// One relational statement extracted from a sentence. Objects are stored in
// their surface form (years as decimal strings).
struct ProvenanceTriple {
  std::string relation;
  std::string subject;
  std::string object;

  bool operator==(const ProvenanceTriple&) const = default;
  auto operator<=>(const ProvenanceTriple&) const = default;
};

using ProvenanceMap = std::map<FactId, std::vector<ProvenanceTriple>>;

enum class EntityClass { Person, City, Occupation, Trait, Year };

// Entity pools shared by every generated database. Region containment for
// implicit-location questions is resolved here.
struct Gazetteer {
  struct Place {
    std::string city;
    std::string country;
    std::string continent;
  };

  std::vector<std::string> people;
  std::vector<std::string> fictional_people;  // likes-subjects, never in `people`
  std::vector<std::string> occupations;
  std::vector<std::string> traits;
  std::vector<Place> places;
  int year_min = 1900;
  int year_max = 1999;

  static Gazetteer standard();

  const Place* find_city(std::string_view city) const;
  bool is_region(std::string_view name) const;  // country or continent
  // True when `city` lies in the country or continent `region`.
  bool region_contains(std::string_view region, std::string_view city) const;
};

bool validate_entity(EntityClass cls, std::string_view text, const Gazetteer& gaz);

enum class QueryKind { LookupBool, LookupExtract, JoinBool, JoinExtract, Set, Count, MinMax };

std::string_view to_string(QueryKind kind);
std::optional<QueryKind> query_kind_from_string(std::string_view label);

// Query surface form attached to a relation. `ask` says which end of the
// relation the answer comes from when only one end is bound by the pattern.
struct QueryTemplate {
  QueryKind kind = QueryKind::LookupExtract;
  std::string pattern;  // $S and/or $O placeholders
  enum class Ask { Subject, Object } ask = Ask::Object;
};

struct RelationSpec {
  std::string name;
  bool functional = true;
  bool symmetric = false;
  EntityClass subject_class = EntityClass::Person;
  EntityClass object_class = EntityClass::Person;
  std::vector<std::string> fact_templates;  // each uses $S and $O exactly once
  std::vector<QueryTemplate> query_templates;
};

// A sentence stating two triples at once. Slots: 'S', '1' ($O1), '2' ($O2).
struct CompositeTemplate {
  struct Triple {
    std::string relation;
    char subject_slot = 'S';
    char object_slot = '1';
  };
  std::string pattern;  // uses $S, $O1, $O2 exactly once each
  std::vector<Triple> triples;
};

// r1 hops subject -> bridge, r2 hops bridge -> answer.
struct JoinTemplate {
  std::string relation1;
  std::string relation2;
  QueryKind kind = QueryKind::JoinExtract;  // JoinBool or JoinExtract
  std::string pattern;                      // $S (+ $O when boolean)
};

// Closed-form extremum questions over one tuple-producing relation.
struct MinMaxTemplate {
  std::string relation;
  std::string pattern;  // no placeholders
  AggregationFunction agg = AggregationFunction::ArgMin;
};

struct ParsedQuery {
  QueryKind kind = QueryKind::LookupExtract;
  AggregationFunction agg = AggregationFunction::NoAggregation;
  std::string relation;
  std::string relation2;  // joins only
  std::optional<std::string> subject;
  std::optional<std::string> object;
  bool ask_subject = false;     // set/count asking for subjects
  bool implicit_region = false; // boolean object names a country/continent
  // Relation metadata captured at parse time so that derivation enumeration
  // needs no registry access.
  bool relation_functional = true;
  bool relation_symmetric = false;
  bool relation2_functional = true;
  bool relation2_symmetric = false;
};

class TemplateRegistry {
 public:
  // Seven generation relations plus motherOf (parse-only), four composite
  // forms, five join forms, six extremum questions.
  static TemplateRegistry standard();

  void add_relation(RelationSpec spec);
  void add_composite(CompositeTemplate tmpl);
  void add_join(JoinTemplate tmpl);
  void add_minmax(MinMaxTemplate tmpl);

  bool has_relation(std::string_view name) const;
  const RelationSpec& relation(std::string_view name) const;
  const std::vector<RelationSpec>& relations() const { return relations_; }
  const std::vector<CompositeTemplate>& composites() const { return composites_; }
  const std::vector<JoinTemplate>& joins() const { return joins_; }
  const std::vector<MinMaxTemplate>& minmax() const { return minmax_; }

  std::string render_fact(std::string_view relation, std::string_view subject,
                          std::string_view object, std::size_t template_index) const;
  std::string render_composite(std::size_t composite_index, std::string_view subject,
                               std::string_view o1, std::string_view o2) const;

  // Inverse template matching; first matching template with class-valid
  // entities wins. Composites are tried before atomic forms.
  std::optional<std::vector<ProvenanceTriple>> parse_fact(std::string_view text,
                                                          const Gazetteer& gaz) const;
  // Extremum forms, then joins, then per-relation templates.
  std::optional<ParsedQuery> parse_query(std::string_view text, const Gazetteer& gaz) const;

 private:
  std::vector<RelationSpec> relations_;
  std::vector<CompositeTemplate> composites_;
  std::vector<JoinTemplate> joins_;
  std::vector<MinMaxTemplate> minmax_;
  std::map<std::string, std::size_t, std::less<>> by_name_;
};

// Substitutes $S / $O / $O1 / $O2; placeholders without a value are an error.
std::string render_pattern(std::string_view pattern,
                           const std::map<char, std::string_view>& slots);

}  // namespace ndb
