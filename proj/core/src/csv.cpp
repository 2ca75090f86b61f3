#include "didipw/csv.hpp"

#include <fstream>
#include <sstream>

#include "didipw/common.hpp"

namespace didipw {

int RawTable::column(const std::string& name) const {
    for (std::size_t j = 0; j < header.size(); ++j) {
        if (header[j] == name) return static_cast<int>(j);
    }
    return -1;
}

namespace {

std::vector<std::string> parse_line(const std::string& line, char delimiter,
                                    std::size_t line_no) {
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
        } else if (c == '"' && field.empty()) {
            quoted = true;
        } else if (c == delimiter) {
            fields.push_back(std::move(field));
            field.clear();
        } else {
            field += c;
        }
    }
    if (quoted) {
        throw ValidationError("line " + std::to_string(line_no) + ": unterminated quote");
    }
    fields.push_back(std::move(field));
    return fields;
}

} // namespace

RawTable parse_delimited(const std::string& text, char delimiter) {
    RawTable table;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line_no == 1) {
            table.header = parse_line(line, delimiter, line_no);
            continue;
        }
        if (line.empty()) continue;
        auto fields = parse_line(line, delimiter, line_no);
        if (fields.size() != table.header.size()) {
            throw ValidationError("line " + std::to_string(line_no) + ": expected " +
                                  std::to_string(table.header.size()) + " fields, got " +
                                  std::to_string(fields.size()));
        }
        table.rows.push_back(std::move(fields));
    }
    if (table.header.empty()) {
        throw ValidationError("input has no header row");
    }
    return table;
}

RawTable read_delimited_file(const std::string& path, char delimiter) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ValidationError("cannot open file: " + path);
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_delimited(buffer.str(), delimiter);
}

std::string csv_escape(const std::string& field, char delimiter) {
    const bool needs_quote = field.find(delimiter) != std::string::npos ||
                             field.find('"') != std::string::npos ||
                             field.find('\n') != std::string::npos;
    if (!needs_quote) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += '"';
    return out;
}

} // namespace didipw
