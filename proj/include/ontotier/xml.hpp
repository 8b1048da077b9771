#pragma once

// Minimal namespace-aware XML DOM on top of expat, plus the escaping helpers
// shared by every writer in the project.

#include <string>
#include <string_view>
#include <vector>

namespace ontotier::xml {

inline constexpr std::string_view kXmlNs = "http://www.w3.org/XML/1998/namespace";

struct Attribute {
  std::string ns;  // empty for unqualified attributes
  std::string name;
  std::string value;
};

struct Element {
  std::string ns;
  std::string name;
  std::vector<Attribute> attributes;
  std::vector<Element> children;
  std::string text;  // character data directly inside this element, concatenated
  long line = 0;

  const std::string* attribute(std::string_view ns, std::string_view name) const;
  bool is(std::string_view ns, std::string_view name) const { return this->ns == ns && this->name == name; }
  /// `{ns}name`, used in diagnostics.
  std::string qualified_name() const;
};

/// Parses a complete document. Throws Error{MalformedXml} on any
/// well-formedness failure, including empty input.
Element parse(std::string_view bytes);

std::string escape_text(std::string_view s);
std::string escape_attribute(std::string_view s);

}  // namespace ontotier::xml
