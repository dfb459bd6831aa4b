#pragma once

#include <json.hpp>

#include <string>

namespace normgeo {

using Json = nlohmann::json;

/// Canonical text form: keys sorted, 2-space indent, floats printed with 17
/// significant digits, non-finite floats as null. Byte-stable for equal input.
std::string canonical_dump(const Json& j);

/// Same canonical rules on a single line (for JSON-lines output).
std::string canonical_line(const Json& j);

/// Double formatted with 17 significant digits ("nan"/"inf"/"-inf" for non-finite).
std::string format_double(double x);

/// Inverse of format_double (accepts the non-finite spellings).
double parse_double(const std::string& s);

void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

}  // namespace normgeo
