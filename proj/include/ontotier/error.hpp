#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <string_view>

namespace ontotier {

/// Every failure the engine can report. The enumerator names double as the
/// machine-readable codes exposed by the CLI and the HTTP API.
enum class ErrorCode {
  // xml / ontology
  MalformedXml,
  CyclicHierarchy,
  UnresolvableBase,
  UnknownClass,
  UnknownProperty,
  InconsistentConstraints,
  DuplicateIri,
  CardinalityViolation,
  ValueTypeViolation,
  // profiles
  EmptySource,
  DuplicateName,
  EmptyMapping,
  SchemaViolation,
  // annotation documents
  DuplicateId,
  InvalidId,
  InvalidOntologicalCombination,
  UnknownType,
  UnknownTier,
  RootMustBeAlignable,
  ChildNeedsReferringType,
  TimeSubdivisionNeedsAlignableParent,
  MissingProfile,
  ProfileAlreadyBound,
  UnexpectedProfile,
  NotAlignableTier,
  NotReferringTier,
  OverlapRejected,
  InvalidInterval,
  OntologyValueOnAlignable,
  CutOutsideParent,
  NotTimeSubdivision,
  AlreadySubdivided,
  AssociationAlreadyPresent,
  UnknownSibling,
  WrongTierParent,
  UnknownAnnotation,
  UnknownSlot,
  TermNotInProfile,
  EmptyInstances,
  WrongValueKind,
  ProfileUnavailable,
  ChildWouldEscape,
  UnsetTimes,
  InvariantViolation,
  // serializer
  DanglingReference,
  UnknownConstraint,
  // service / io
  IoError,
  NotFound,
  BadRequest,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& message,
        std::map<std::string, std::string> details = {})
      : std::runtime_error(message), code_(code), details_(std::move(details)) {}

  ErrorCode code() const noexcept { return code_; }
  const std::map<std::string, std::string>& details() const noexcept { return details_; }

private:
  ErrorCode code_;
  std::map<std::string, std::string> details_;
};

}  // namespace ontotier
