#pragma once

#include <string>
#include <vector>

#include "mvsne/core.hpp"

namespace mvsne::csv {

struct ReadOptions {
    char delimiter = ',';
    bool header = false;
};

struct Table {
    std::vector<std::string> header;  // empty when the file has none
    std::vector<std::vector<std::string>> rows;
};

/// Reads a delimited UTF-8 text file. Handles RFC-4180 quoting on input.
Table read_table(const std::string& path, const ReadOptions& opts);

/// Parses every cell as a double; throws DataError naming the offending cell.
Mat to_matrix(const Table& table, const std::string& source_name);

/// Quotes a field if it contains the delimiter, a quote or a newline.
std::string escape_field(const std::string& field, char delimiter = ',');

/// Round-trip exact formatting for doubles (shortest %.17g form).
std::string format_double(double v);

/// Writes content atomically: temp file in the same directory, then rename.
void atomic_write(const std::string& path, const std::string& content);

}  // namespace mvsne::csv
