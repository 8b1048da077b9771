#include "ontotier/profile.hpp"

#include "ontotier/error.hpp"
#include "ontotier/xml.hpp"

#include <algorithm>
#include <set>

namespace ontotier {

namespace {

void check_term(const Profile& profile, const std::string& name, const std::vector<std::string>& ontology_terms,
                ErrorCode duplicate_code, ErrorCode mapping_code) {
  if (profile.find_term(name) != nullptr) {
    throw Error(duplicate_code, "user-defined term '" + name + "' already exists", {{"name", name}});
  }
  if (ontology_terms.empty()) {
    throw Error(mapping_code, "user-defined term '" + name + "' maps to no ontology term", {{"name", name}});
  }
  std::set<std::string> seen;
  for (const auto& t : ontology_terms) {
    if (t.empty()) throw Error(mapping_code, "empty ontology term in '" + name + "'", {{"name", name}});
    if (!seen.insert(t).second) {
      throw Error(mapping_code, "ontology term '" + t + "' listed twice in '" + name + "'",
                  {{"name", name}, {"ontology_term", t}});
    }
  }
}

const std::string& required(const xml::Element& el, const char* attr) {
  if (const auto* v = el.attribute("", attr)) return *v;
  throw Error(ErrorCode::SchemaViolation,
              "line " + std::to_string(el.line) + ": <" + el.name + "> lacks required attribute " + attr,
              {{"element", el.name}, {"attribute", attr}});
}

void allow_attributes(const xml::Element& el, std::initializer_list<std::string_view> allowed) {
  for (const auto& a : el.attributes) {
    if (!a.ns.empty()) continue;  // xmlns-qualified or xml:* attributes are tolerated
    if (std::find(allowed.begin(), allowed.end(), a.name) == allowed.end()) {
      throw Error(ErrorCode::SchemaViolation,
                  "line " + std::to_string(el.line) + ": unexpected attribute " + a.name + " on <" + el.name + ">",
                  {{"element", el.name}, {"attribute", a.name}});
    }
  }
}

}  // namespace

const UserDefinedTerm* Profile::find_term(std::string_view name) const {
  for (const auto& t : terms) {
    if (t.name == name) return &t;
  }
  return nullptr;
}

Profile new_profile(std::string author, std::string version, owl::Iri source) {
  if (source.empty()) throw Error(ErrorCode::EmptySource, "a profile needs a source ontology");
  Profile p;
  p.author = std::move(author);
  p.version = std::move(version);
  p.source = std::move(source);
  return p;
}

void add_term(Profile& profile, std::string name, std::vector<std::string> ontology_terms, std::string description) {
  check_term(profile, name, ontology_terms, ErrorCode::DuplicateName, ErrorCode::EmptyMapping);
  profile.terms.push_back({std::move(name), std::move(description), std::move(ontology_terms)});
}

std::string serialize_profile(const Profile& p) {
  std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<PROFILE AUTHOR=\"" + xml::escape_attribute(p.author) + "\" DESCRIPTION=\"" +
         xml::escape_attribute(p.description) + "\" VERSION=\"" + xml::escape_attribute(p.version) + "\" SOURCE=\"" +
         xml::escape_attribute(p.source) + "\"";
  if (p.terms.empty()) return out + "/>\n";
  out += ">\n";
  for (const auto& t : p.terms) {
    out += "<USER_DEFINED_TERM DESCRIPTION=\"" + xml::escape_attribute(t.description) + "\" NAME=\"" +
           xml::escape_attribute(t.name) + "\">\n";
    for (const auto& o : t.ontology_terms) out += "  <ONTOLOGY_TERM NAME=\"" + xml::escape_attribute(o) + "\"/>\n";
    out += "</USER_DEFINED_TERM>\n";
  }
  out += "</PROFILE>\n";
  return out;
}

Profile parse_profile(std::string_view bytes) {
  auto root = xml::parse(bytes);
  if (!root.ns.empty() || root.name != "PROFILE") {
    throw Error(ErrorCode::SchemaViolation, "root element must be PROFILE, found " + root.qualified_name());
  }
  allow_attributes(root, {"AUTHOR", "DESCRIPTION", "VERSION", "SOURCE"});
  Profile p;
  p.author = required(root, "AUTHOR");
  p.version = required(root, "VERSION");
  p.source = required(root, "SOURCE");
  if (const auto* d = root.attribute("", "DESCRIPTION")) p.description = *d;
  if (p.source.empty()) throw Error(ErrorCode::SchemaViolation, "PROFILE has an empty SOURCE");

  for (const auto& udt : root.children) {
    if (!udt.ns.empty() || udt.name != "USER_DEFINED_TERM") {
      throw Error(ErrorCode::SchemaViolation,
                  "line " + std::to_string(udt.line) + ": unexpected element " + udt.qualified_name());
    }
    allow_attributes(udt, {"NAME", "DESCRIPTION"});
    UserDefinedTerm term;
    term.name = required(udt, "NAME");
    if (const auto* d = udt.attribute("", "DESCRIPTION")) term.description = *d;
    for (const auto& ot : udt.children) {
      if (!ot.ns.empty() || ot.name != "ONTOLOGY_TERM") {
        throw Error(ErrorCode::SchemaViolation,
                    "line " + std::to_string(ot.line) + ": unexpected element " + ot.qualified_name());
      }
      allow_attributes(ot, {"NAME"});
      term.ontology_terms.push_back(required(ot, "NAME"));
    }
    check_term(p, term.name, term.ontology_terms, ErrorCode::SchemaViolation, ErrorCode::SchemaViolation);
    p.terms.push_back(std::move(term));
  }
  return p;
}

std::string ProfileFinding::message() const {
  if (kind == Kind::Unresolved) {
    return "'" + ontology_term + "' (in '" + user_term + "') names no class or individual";
  }
  std::string list;
  for (const auto& c : candidates) list += (list.empty() ? "" : ", ") + c;
  return "'" + ontology_term + "' (in '" + user_term + "') is ambiguous: " + list;
}

std::vector<ResolvedTerm> resolve_term(const UserDefinedTerm& term, const owl::OntologyDocument& doc) {
  std::vector<ResolvedTerm> out;
  for (const auto& name : term.ontology_terms) {
    ResolvedTerm r{name, {}, {}};
    for (const auto& [iri, cls] : doc.classes) {
      if (owl::local_name(iri) == name) r.classes.push_back(iri);
    }
    for (const auto& [iri, ind] : doc.individuals) {
      if (owl::local_name(iri) == name) r.individuals.push_back(iri);
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<ProfileFinding> validate_against_ontology(const Profile& profile, const owl::OntologyDocument& doc) {
  std::vector<ProfileFinding> findings;
  for (const auto& term : profile.terms) {
    for (auto& r : resolve_term(term, doc)) {
      std::set<owl::Iri> candidates(r.classes.begin(), r.classes.end());
      candidates.insert(r.individuals.begin(), r.individuals.end());
      if (candidates.empty()) {
        findings.push_back({ProfileFinding::Kind::Unresolved, term.name, r.ontology_term, {}});
      } else if (candidates.size() > 1) {
        findings.push_back({ProfileFinding::Kind::Ambiguous, term.name, r.ontology_term,
                            std::vector<owl::Iri>(candidates.begin(), candidates.end())});
      }
    }
  }
  return findings;
}

}  // namespace ontotier
