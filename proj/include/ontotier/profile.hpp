#pragma once

// Language profiles: user-defined annotation terms mapped onto terms of a
// source ontology, stored in the PROFILE/USER_DEFINED_TERM/ONTOLOGY_TERM
// XML format (.prf).

#include "ontotier/owl_model.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace ontotier {

struct UserDefinedTerm {
  std::string name;
  std::string description;
  /// Local names of ontology classes or individuals, in display order.
  std::vector<std::string> ontology_terms;

  bool operator==(const UserDefinedTerm&) const = default;
};

struct Profile {
  std::string author;
  std::string description;
  std::string version;
  owl::Iri source;
  std::vector<UserDefinedTerm> terms;

  bool operator==(const Profile&) const = default;

  const UserDefinedTerm* find_term(std::string_view name) const;
};

Profile new_profile(std::string author, std::string version, owl::Iri source);

/// Appends a term. Existing terms are never modified.
void add_term(Profile& profile, std::string name, std::vector<std::string> ontology_terms,
              std::string description = {});

/// Canonical form: attributes in the order AUTHOR, DESCRIPTION, VERSION,
/// SOURCE and DESCRIPTION, NAME; UTF-8.
std::string serialize_profile(const Profile& profile);

/// Accepts any attribute order and insignificant whitespace.
Profile parse_profile(std::string_view bytes);

struct ProfileFinding {
  enum class Kind { Unresolved, Ambiguous } kind;
  std::string user_term;
  std::string ontology_term;
  std::vector<owl::Iri> candidates;  // the colliding IRIs for Ambiguous

  std::string message() const;
};

std::vector<ProfileFinding> validate_against_ontology(const Profile& profile, const owl::OntologyDocument& doc);

/// What a user-defined term stands for in a concrete ontology: each
/// ontology term resolved to the classes and individuals carrying that
/// local name.
struct ResolvedTerm {
  std::string ontology_term;
  std::vector<owl::Iri> classes;
  std::vector<owl::Iri> individuals;
};

std::vector<ResolvedTerm> resolve_term(const UserDefinedTerm& term, const owl::OntologyDocument& doc);

}  // namespace ontotier
