#pragma once

// Time-aligned annotation documents: linguistic types, tier forests, time
// slots, alignable and referring annotations, and the constraint and
// cascade rules tying them together.
//
// Every mutating operation validates first and then applies, so a thrown
// Error leaves the document untouched.

#include "ontotier/owl_model.hpp"
#include "ontotier/profile.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace ontotier {

enum class Stereotype { None, TimeSubdivision, SymbolicSubdivision, SymbolicAssociation };

std::string_view to_string(Stereotype s) noexcept;
/// Inverse of to_string; also accepts the serialized constraint spellings
/// ("Symbolic_Association", ...).
std::optional<Stereotype> parse_stereotype(std::string_view s) noexcept;
bool is_time_alignable(Stereotype s) noexcept;

enum class TimeUnit { Milliseconds };

struct MediaDescriptor {
  std::string media_url;
  std::string mime_type;
  std::int64_t time_origin_offset = 0;
  std::optional<std::string> extracted_from;
  bool operator==(const MediaDescriptor&) const = default;
};

struct LinguisticType {
  std::string id;
  Stereotype stereotype = Stereotype::None;
  bool time_alignable = true;
  bool ontological = false;
  bool graphic_ref = false;
  bool operator==(const LinguisticType&) const = default;
};

struct TimeSlot {
  std::string id;
  std::optional<std::int64_t> value;
  bool operator==(const TimeSlot&) const = default;
};

struct Tier {
  std::string id;
  std::optional<std::string> parent;
  std::string type_id;
  /// Literal profile path, set exactly for ontological tiers.
  std::optional<std::string> profile_ref;
  bool operator==(const Tier&) const = default;
};

struct StringValue {
  std::string text;
  bool operator==(const StringValue&) const = default;
};

struct OntologyValue {
  std::string ont_annotation_id;
  std::string user_defined_term;
  std::vector<owl::Iri> instances;
  std::vector<std::string> descriptions;
  bool operator==(const OntologyValue&) const = default;
};

using AnnotationValue = std::variant<StringValue, OntologyValue>;

struct AlignableAnnotation {
  std::string id;
  std::string tier_id;
  std::string begin_slot;
  std::string end_slot;
  /// Set only for time-subdivision children: the annotation they subdivide.
  std::optional<std::string> parent;
  AnnotationValue value;
  bool operator==(const AlignableAnnotation&) const = default;
};

struct ReferringAnnotation {
  std::string id;
  std::string tier_id;
  std::string ref_annotation;
  /// Preceding sibling in a symbolic-subdivision chain.
  std::optional<std::string> previous;
  AnnotationValue value;
  bool operator==(const ReferringAnnotation&) const = default;
};

using Annotation = std::variant<AlignableAnnotation, ReferringAnnotation>;

const std::string& annotation_id(const Annotation& a);
const std::string& annotation_tier(const Annotation& a);
const AnnotationValue& annotation_value(const Annotation& a);
/// The annotation this one depends on: ref_annotation, or the subdivided
/// parent of a time-subdivision child.
std::optional<std::string> annotation_parent(const Annotation& a);
/// Numeric part of an "a<n>" id, 0 when malformed.
std::uint64_t annotation_ordinal(std::string_view id);

struct AnnotationDocument {
  std::string id;
  std::vector<MediaDescriptor> media;
  TimeUnit time_unit = TimeUnit::Milliseconds;
  std::vector<std::string> time_order;
  std::map<std::string, TimeSlot> slots;
  std::map<std::string, LinguisticType> linguistic_types;
  std::map<std::string, Tier> tiers;
  std::map<std::string, Annotation> annotations;
  std::uint64_t next_annotation_ordinal = 1;
  std::uint64_t next_slot_ordinal = 1;

  bool operator==(const AnnotationDocument&) const = default;

  const Tier& tier(std::string_view id) const;
  const LinguisticType& type_of(const Tier& tier) const;
  const Annotation& annotation(std::string_view id) const;
};

/// Resolves a tier's profile reference to a loaded profile, or nullptr.
using ProfileLookup = std::function<const Profile*(std::string_view profile_ref)>;

struct Extent {
  std::int64_t begin = 0;
  std::int64_t end = 0;
  bool operator==(const Extent&) const = default;
};

AnnotationDocument new_document(std::string id, std::vector<MediaDescriptor> media = {});

void add_linguistic_type(AnnotationDocument& doc, std::string id, Stereotype stereotype, bool ontological);

void add_tier(AnnotationDocument& doc, std::string id, std::optional<std::string> parent, std::string type_id,
              std::optional<std::string> profile_ref = std::nullopt);

/// Removes the tier, its descendant tiers and all their annotations.
void delete_tier(AnnotationDocument& doc, std::string_view id);

std::string add_alignable_annotation(AnnotationDocument& doc, std::string_view tier, std::int64_t begin_ms,
                                     std::int64_t end_ms, AnnotationValue value = StringValue{});

/// Splits `parent_annotation` at `cut_points` into contiguous children on
/// `child_tier`, a time-subdivision tier under the parent's tier.
std::vector<std::string> subdivide_time(AnnotationDocument& doc, std::string_view parent_annotation,
                                        std::string_view child_tier, const std::vector<std::int64_t>& cut_points);

/// Adds a referring annotation under `parent_annotation`. For symbolic
/// subdivision the new annotation goes right after `after`, or at the end
/// of the chain when `after` is empty.
std::string add_referring_annotation(AnnotationDocument& doc, std::string_view tier,
                                     std::string_view parent_annotation, AnnotationValue value,
                                     std::optional<std::string> after = std::nullopt,
                                     const ProfileLookup& profiles = {});

void set_annotation_value(AnnotationDocument& doc, std::string_view annotation, AnnotationValue value,
                          const ProfileLookup& profiles = {});

/// Removes the annotation and everything that refers to it, transitively.
void delete_annotation(AnnotationDocument& doc, std::string_view id);

enum class AlterMode { Reject, Trim };

void alter_time_slot(AnnotationDocument& doc, std::string_view slot, std::int64_t new_value_ms, AlterMode mode);

Extent resolve_time_extent(const AnnotationDocument& doc, std::string_view annotation);

struct SearchHit {
  std::string tier_id;
  std::string annotation_id;
  std::string text;
  Extent extent;
  bool operator==(const SearchHit&) const = default;
};

std::vector<SearchHit> search(const AnnotationDocument& doc, std::string_view query,
                              const std::optional<std::vector<std::string>>& tiers = std::nullopt,
                              bool case_sensitive = true);

/// Text a search matches against: the string, or the user-defined term.
const std::string& searchable_text(const AnnotationValue& value);

struct Violation {
  std::string rule;
  std::string subject;
  std::string message;
};

/// Exhaustive invariant checker, independent of the mutating operations.
/// With `profiles`, ontology values are also checked against the bound
/// profile's terms.
std::vector<Violation> check_invariants(const AnnotationDocument& doc, const ProfileLookup& profiles = {});

/// Tier ids from roots to leaves (parents before children), ties by id.
std::vector<std::string> tiers_top_down(const AnnotationDocument& doc);

/// Direct dependents of an annotation (referring children and time
/// subdivision children), ordered by ordinal.
std::vector<std::string> dependents_of(const AnnotationDocument& doc, std::string_view annotation);

/// Annotations on `tier` that refer to `parent` in sibling-chain order.
std::vector<std::string> chain_of(const AnnotationDocument& doc, std::string_view tier, std::string_view parent);

}  // namespace ontotier
