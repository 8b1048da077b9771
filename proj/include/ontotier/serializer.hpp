#pragma once

// RDF/XML persistence of annotation documents as instance data of the
// multimedia annotation ontology. docs/FORMAT.md is the normative
// description of the element names and their order.

#include "ontotier/annodoc.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace ontotier {

inline constexpr std::string_view kMediaNs = "http://database.cs.wayne.edu/proj/OntoELAN/multimedia.owl#";

/// Writes `doc` with `doc.id` as the base IRI. Output is deterministic.
std::string save_document(const AnnotationDocument& doc);

/// Inverse of save_document. The result passes check_invariants (without
/// profile lookup) or InvariantViolation is thrown.
AnnotationDocument load_document(std::string_view bytes);

/// Structural findings on a serialized document, without building one.
/// Only malformed XML throws.
std::vector<Violation> validate_file(std::string_view bytes);

}  // namespace ontotier
