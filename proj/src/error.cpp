#include "ontotier/error.hpp"

namespace ontotier {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::MalformedXml: return "MalformedXml";
    case ErrorCode::CyclicHierarchy: return "CyclicHierarchy";
    case ErrorCode::UnresolvableBase: return "UnresolvableBase";
    case ErrorCode::UnknownClass: return "UnknownClass";
    case ErrorCode::UnknownProperty: return "UnknownProperty";
    case ErrorCode::InconsistentConstraints: return "InconsistentConstraints";
    case ErrorCode::DuplicateIri: return "DuplicateIri";
    case ErrorCode::CardinalityViolation: return "CardinalityViolation";
    case ErrorCode::ValueTypeViolation: return "ValueTypeViolation";
    case ErrorCode::EmptySource: return "EmptySource";
    case ErrorCode::DuplicateName: return "DuplicateName";
    case ErrorCode::EmptyMapping: return "EmptyMapping";
    case ErrorCode::SchemaViolation: return "SchemaViolation";
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::InvalidId: return "InvalidId";
    case ErrorCode::InvalidOntologicalCombination: return "InvalidOntologicalCombination";
    case ErrorCode::UnknownType: return "UnknownType";
    case ErrorCode::UnknownTier: return "UnknownTier";
    case ErrorCode::RootMustBeAlignable: return "RootMustBeAlignable";
    case ErrorCode::ChildNeedsReferringType: return "ChildNeedsReferringType";
    case ErrorCode::TimeSubdivisionNeedsAlignableParent: return "TimeSubdivisionNeedsAlignableParent";
    case ErrorCode::MissingProfile: return "MissingProfile";
    case ErrorCode::ProfileAlreadyBound: return "ProfileAlreadyBound";
    case ErrorCode::UnexpectedProfile: return "UnexpectedProfile";
    case ErrorCode::NotAlignableTier: return "NotAlignableTier";
    case ErrorCode::NotReferringTier: return "NotReferringTier";
    case ErrorCode::OverlapRejected: return "OverlapRejected";
    case ErrorCode::InvalidInterval: return "InvalidInterval";
    case ErrorCode::OntologyValueOnAlignable: return "OntologyValueOnAlignable";
    case ErrorCode::CutOutsideParent: return "CutOutsideParent";
    case ErrorCode::NotTimeSubdivision: return "NotTimeSubdivision";
    case ErrorCode::AlreadySubdivided: return "AlreadySubdivided";
    case ErrorCode::AssociationAlreadyPresent: return "AssociationAlreadyPresent";
    case ErrorCode::UnknownSibling: return "UnknownSibling";
    case ErrorCode::WrongTierParent: return "WrongTierParent";
    case ErrorCode::UnknownAnnotation: return "UnknownAnnotation";
    case ErrorCode::UnknownSlot: return "UnknownSlot";
    case ErrorCode::TermNotInProfile: return "TermNotInProfile";
    case ErrorCode::EmptyInstances: return "EmptyInstances";
    case ErrorCode::WrongValueKind: return "WrongValueKind";
    case ErrorCode::ProfileUnavailable: return "ProfileUnavailable";
    case ErrorCode::ChildWouldEscape: return "ChildWouldEscape";
    case ErrorCode::UnsetTimes: return "UnsetTimes";
    case ErrorCode::InvariantViolation: return "InvariantViolation";
    case ErrorCode::DanglingReference: return "DanglingReference";
    case ErrorCode::UnknownConstraint: return "UnknownConstraint";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::NotFound: return "NotFound";
    case ErrorCode::BadRequest: return "BadRequest";
  }
  return "Unknown";
}

}  // namespace ontotier
