#pragma once

#include <string>
#include <vector>

namespace didipw {

// Delimiter-separated text with a mandatory header row. Fields may be
// double-quoted; embedded quotes escape as "". Rows with a field count
// different from the header are an error.
struct RawTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    // Column position by name; -1 when absent.
    int column(const std::string& name) const;
};

RawTable read_delimited_file(const std::string& path, char delimiter = ',');
RawTable parse_delimited(const std::string& text, char delimiter = ',');

// Quotes a field if it contains the delimiter, a quote, or a newline.
std::string csv_escape(const std::string& field, char delimiter = ',');

} // namespace didipw
