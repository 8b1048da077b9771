#pragma once

// OWL-subset ontology model: parsed from RDF/XML, queried for the class
// tree, the alphabetical term index and instance-form metadata.

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace ontotier::owl {

using Iri = std::string;

namespace ns {
inline constexpr std::string_view rdf = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
inline constexpr std::string_view rdfs = "http://www.w3.org/2000/01/rdf-schema#";
inline constexpr std::string_view owl = "http://www.w3.org/2002/07/owl#";
inline constexpr std::string_view xsd = "http://www.w3.org/2001/XMLSchema#";
}  // namespace ns

struct Resource {
  Iri iri;
  auto operator<=>(const Resource&) const = default;
};

struct Literal {
  std::string lexical;
  std::string datatype;  // empty for plain literals
  auto operator<=>(const Literal&) const = default;
};

/// An asserted property value: a resource reference or a literal.
using Value = std::variant<Resource, Literal>;

std::string to_string(const Value& v);

struct AllValuesFrom { Iri class_iri; bool operator==(const AllValuesFrom&) const = default; };
struct SomeValuesFrom { Iri class_iri; bool operator==(const SomeValuesFrom&) const = default; };
struct HasValue { Value value; bool operator==(const HasValue&) const = default; };
struct MinCardinality { std::size_t n; bool operator==(const MinCardinality&) const = default; };
struct MaxCardinality { std::size_t n; bool operator==(const MaxCardinality&) const = default; };
struct ExactCardinality { std::size_t n; bool operator==(const ExactCardinality&) const = default; };

using Constraint =
    std::variant<AllValuesFrom, SomeValuesFrom, HasValue, MinCardinality, MaxCardinality, ExactCardinality>;

struct Restriction {
  Iri on_property;
  Constraint constraint;
  bool operator==(const Restriction&) const = default;
};

struct OwlClass {
  Iri iri;
  std::string label;
  std::set<Iri> superclasses;
  std::set<Iri> disjoint_with;
  std::set<Iri> equivalent_to;
  std::optional<std::vector<Iri>> one_of;
  std::vector<Restriction> restrictions;
};

enum class PropertyKind { Object, Datatype };

enum Characteristic : unsigned {
  Functional = 1u << 0,
  InverseFunctional = 1u << 1,
  Transitive = 1u << 2,
  Symmetric = 1u << 3,
};

struct OwlProperty {
  Iri iri;
  std::string label;
  PropertyKind kind = PropertyKind::Object;
  std::set<Iri> domains;
  std::set<Iri> ranges;
  std::set<Iri> superproperties;
  unsigned characteristics = 0;

  bool has(Characteristic c) const { return (characteristics & c) != 0; }
};

struct Individual {
  Iri iri;
  std::set<Iri> types;
  std::multimap<Iri, Value> assertions;
};

struct OntologyDocument {
  Iri base_iri;
  std::map<Iri, OwlClass> classes;
  std::map<Iri, OwlProperty> properties;
  std::map<Iri, Individual> individuals;
  std::vector<std::string> warnings;
  std::string source;
};

/// Local name of an IRI: the part after '#', else after the last '/'.
std::string local_name(std::string_view iri);

/// Resolves an IRI reference against a base (RFC 3986 merge, no dot-segment
/// removal). Throws Error{UnresolvableBase} when `ref` is relative and `base`
/// is not absolute.
Iri resolve_iri(std::string_view base, std::string_view ref);

/// Parses the supported RDF/XML subset. Unsupported constructs are recorded
/// in `warnings`, one entry per unsupported element.
OntologyDocument parse_ontology(std::string_view bytes, std::string_view base, std::string source = {});

struct ClassNode {
  Iri iri;
  std::string label;
  std::vector<ClassNode> children;
};

/// Class hierarchy as a forest. A class with k in-document superclasses is
/// repeated under each of them.
std::vector<ClassNode> class_tree(const OntologyDocument& doc);

struct IndexEntry {
  std::string label;
  Iri iri;
  bool operator==(const IndexEntry&) const = default;
};

/// Case-insensitive label comparison, ties broken by IRI.
bool label_less(std::string_view a_label, std::string_view a_iri, std::string_view b_label, std::string_view b_iri);

std::vector<IndexEntry> term_index(const OntologyDocument& doc);

/// `cls` and all of its in-document ancestors.
std::set<Iri> ancestors_or_self(const OntologyDocument& doc, const Iri& cls);
/// `cls` and all of its in-document descendants.
std::set<Iri> descendants_or_self(const OntologyDocument& doc, const Iri& cls);

std::vector<Individual> instances_of(const OntologyDocument& doc, const Iri& cls, bool transitive);

/// Merged restrictions for one property as seen from one class.
struct EffectiveConstraints {
  std::size_t min = 0;
  std::optional<std::size_t> max;
  std::vector<Iri> all_values_from;
  std::vector<Iri> some_values_from;
  std::vector<Value> has_values;
  bool operator==(const EffectiveConstraints&) const = default;
};

struct ApplicableProperty {
  OwlProperty property;
  EffectiveConstraints constraints;
};

/// Properties whose domain covers `cls` or an ancestor, plus properties
/// restricted on `cls` or an ancestor. Sorted by label.
std::vector<ApplicableProperty> applicable_properties(const OntologyDocument& doc, const Iri& cls);

struct ConstraintViolation {
  enum class Kind { Cardinality, ValueType, UnknownProperty } kind;
  Iri property;
  std::string message;
  std::size_t expected_min = 0;
  std::optional<std::size_t> expected_max;
  std::size_t actual = 0;
};

/// Checks a candidate assertion set against the effective constraints of
/// `cls`. Returns every violation, in property order.
std::vector<ConstraintViolation> validate_individual(const OntologyDocument& doc, const Iri& cls,
                                                     const std::multimap<Iri, Value>& assertions);

/// Validates and stores a new individual named `id` (a local name resolved
/// against the document base). Throws on the first violation.
const Individual& create_individual(OntologyDocument& doc, const Iri& cls, std::string_view id,
                                    std::multimap<Iri, Value> assertions);

}  // namespace ontotier::owl
