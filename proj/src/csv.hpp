#pragma once

#include <string>
#include <vector>

namespace itsforge::csv {

using Row = std::vector<std::string>;

// Parses RFC-4180-style CSV: quoted fields may contain commas, newlines and
// doubled quotes; CRLF and LF both end records; a trailing newline is
// optional. Blank records are skipped.
std::vector<Row> parse(const std::string& text);

std::vector<Row> read_file(const std::string& path);

// Serializes rows, quoting fields that need it. Uses '\n' line endings.
std::string write(const std::vector<Row>& rows);

}  // namespace itsforge::csv
