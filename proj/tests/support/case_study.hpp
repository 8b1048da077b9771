#pragma once

// The six-tier Potawatomi case study: Orthographic, Translation, Words,
// Parse, Gloss and an ontological tier bound to the wabo4 profile.

#include "ontotier/annodoc.hpp"
#include "ontotier/profile.hpp"

#include <string>

namespace fixtures {

inline const std::string kGold = "http://www.u.arizona.edu/~farrar/gold.owl";
inline const std::string kCaseBase = "file:///C:/wabo4.eaf";
inline const std::string kCaseProfileRef = "C:\\wabo4.prf";

/// Sentence extent on the Orthographic tier.
inline constexpr std::int64_t kSentenceBegin = 0;
inline constexpr std::int64_t kSentenceEnd = 4200;

ontotier::Profile case_profile();
/// Resolves kCaseProfileRef to case_profile(); anything else to nullptr.
ontotier::ProfileLookup case_lookup();

/// Tiers and types only.
ontotier::AnnotationDocument case_study_skeleton();
/// Full document with annotations a1..a42.
ontotier::AnnotationDocument build_case_study();

}  // namespace fixtures
