#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace pnas {

// Minimal RFC 4180 reader/writer. Writing quotes a field only when it
// contains a comma, quote, CR or LF, and terminates records with CRLF;
// reading accepts both CRLF and bare LF.

std::string csv_escape(std::string_view field);

void write_csv_row(std::ostream& os, const std::vector<std::string>& fields);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  // Index of the named header column; throws ParseError when absent.
  std::size_t column(std::string_view name) const;
};

// Parses a whole document, first record as header. Throws ParseError on an
// unterminated quoted field or on a record with a different field count
// than the header.
CsvTable read_csv(std::istream& is);
CsvTable read_csv_file(const std::string& path);

// Shortest decimal form that round-trips the exact double, via
// std::to_chars; identical output on every platform, so files built from
// the same numbers compare byte-equal.
std::string format_double(double v);

}  // namespace pnas
