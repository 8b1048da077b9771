#pragma once

// Random inputs for the property tests. Every generator takes the RNG by
// reference so a failing case can be replayed from its seed.

#include "ontotier/annodoc.hpp"
#include "ontotier/profile.hpp"

#include <random>
#include <string>

namespace gen {

using Rng = std::mt19937_64;

/// Text drawn from an alphabet heavy in XML specials, whitespace and
/// non-ASCII letters.
std::string text(Rng& rng, std::size_t max_len = 12);
std::string pick(Rng& rng, const std::vector<std::string>& from);
std::size_t below(Rng& rng, std::size_t n);
bool chance(Rng& rng, double p);

ontotier::Profile profile(Rng& rng);

/// Profiles "prof0.prf".."prof3.prf", each with terms T0..T3.
ontotier::ProfileLookup generated_profiles();
const std::vector<std::string>& generated_profile_refs();

struct DocShape {
  std::size_t max_nodes = 50;  // tiers + annotations
  std::size_t max_tiers = 8;
  std::size_t steps = 80;
  bool edits = true;  // also delete annotations and move slots
};

/// A valid document grown through the engine operations; rejected
/// operations are simply skipped.
ontotier::AnnotationDocument document(Rng& rng, const DocShape& shape = {});

/// A random value fitting `tier` (string or ontology value).
ontotier::AnnotationValue value_for(Rng& rng, const ontotier::AnnotationDocument& doc, const ontotier::Tier& tier);

}  // namespace gen
