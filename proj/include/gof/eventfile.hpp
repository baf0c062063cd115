#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "gof/sample.hpp"

namespace gof {

// Event files: one observation per row, coordinates separated by whitespace
// and/or commas; blank lines and lines starting with '#' are ignored. Every
// row must have the same number of columns and every value must parse as a
// finite real. Errors name the offending line (ParseError).
Sample read_events(std::istream& in, const std::string& source = "<stream>");
Sample read_event_file(const std::filesystem::path& path);

// Writes with 17 significant digits, so reading back reproduces every value.
void write_events(std::ostream& out, const Sample& sample);
void write_event_file(const std::filesystem::path& path, const Sample& sample);

}  // namespace gof
