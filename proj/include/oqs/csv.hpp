// csv.hpp — CSV emission with round-trip-exact numeric formatting, plus a
// small reader for the compare command.

#pragma once

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "oqs/errors.hpp"
#include "oqs/textio.hpp"

namespace oqs {

inline std::string csv_quote(const std::string& cell) {
    if (cell.find_first_of(",\"\n") == std::string::npos) return cell;
    std::string out = "\"";
    for (char c : cell) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    return out + "\"";
}

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    int column(const std::string& name) const {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return int(i);
        return -1;
    }
};

inline void write_csv_header(std::ostream& out, const std::vector<std::string>& header) {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (i) out << ",";
        out << csv_quote(header[i]);
    }
    out << "\n";
}

inline void write_csv_row(std::ostream& out, const std::vector<double>& row) {
    for (std::size_t i = 0; i < row.size(); ++i) {
        if (i) out << ",";
        out << format_double(row[i]);
    }
    out << "\n";
}

// Split one CSV line honoring double-quoted cells.
inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cell += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cell += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(cell);
            cell.clear();
        } else if (c != '\r') {
            cell += c;
        }
    }
    out.push_back(cell);
    return out;
}

inline CsvTable read_csv(std::istream& in, const std::string& origin = "<csv>") {
    CsvTable table;
    std::string line;
    bool have_header = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!have_header) {
            table.header = split_csv_line(line);
            have_header = true;
            continue;
        }
        const auto cells = split_csv_line(line);
        if (cells.size() != table.header.size())
            throw ValidationError(origin + ": row width " + std::to_string(cells.size()) +
                                  " != header width " + std::to_string(table.header.size()));
        std::vector<double> row;
        row.reserve(cells.size());
        for (const auto& c : cells) row.push_back(parse_double(trim(c)));
        table.rows.push_back(std::move(row));
    }
    if (!have_header) throw ValidationError(origin + ": empty CSV");
    return table;
}

inline CsvTable read_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open CSV file '" + path + "'");
    return read_csv(in, path);
}

} // namespace oqs
