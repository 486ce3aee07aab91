#pragma once

// Small serialization helpers shared by the modules and the CLI: shortest
// round-trip double formatting, atomic file writes, and the trace CSV format.

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace supercoh {

// Shortest decimal string that parses back to the identical double.
std::string format_double(double value);
double parse_double(const std::string& text);

std::vector<std::string> split(const std::string& text, char sep);

// Write via temp file + rename so readers never observe partial output.
void atomic_write_file(const std::filesystem::path& path, const std::string& contents);

// `#`-prefixed key=value metadata lines, then a header row, then data rows.
struct CsvTable {
    std::map<std::string, std::string> metadata;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    std::string to_string() const;
    static CsvTable parse(std::istream& is);
    static CsvTable parse_string(const std::string& text);
};

}  // namespace supercoh
