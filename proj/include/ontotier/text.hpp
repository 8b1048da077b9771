#pragma once

#include <string>
#include <string_view>

namespace ontotier::text {

std::string_view trim(std::string_view s);
std::string ascii_lower(std::string_view s);

/// XML NCName restricted to ASCII: a letter or '_' followed by letters,
/// digits, '_', '-' or '.'. Identifiers that become rdf:ID values must pass.
bool is_ncname(std::string_view s);

}  // namespace ontotier::text
