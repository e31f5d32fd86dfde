#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "geocorpus/util.hpp"

namespace geocorpus::csv {

struct ParseError : Error {
    using Error::Error;
};

// RFC-4180-ish: comma separated, double quotes with "" escapes. No
// embedded newlines inside quoted fields (none of our formats need them).
std::vector<std::string> split_line(std::string_view line);

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    // Index of a header column; throws ParseError naming the column.
    std::size_t column(const std::string& name) const;
};

// Loads a whole CSV file. Requires a header row. Skips blank lines.
Table load_file(const std::string& path);

// Quotes a field if it contains comma, quote, or newline.
std::string escape(std::string_view field);

}  // namespace geocorpus::csv
