#include "supercoh/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>

#include "supercoh/errors.hpp"

namespace supercoh {

std::string format_double(double value) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

double parse_double(const std::string& text) {
    double value = 0.0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    while (first != last && (*first == ' ' || *first == '\t')) ++first;
    auto res = std::from_chars(first, last, value);
    if (res.ec != std::errc()) throw ValidationError("cannot parse number: '" + text + "'");
    return value;
}

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        std::size_t pos = text.find(sep, start);
        if (pos == std::string::npos) {
            out.push_back(text.substr(start));
            break;
        }
        out.push_back(text.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

void atomic_write_file(const std::filesystem::path& path, const std::string& contents) {
    namespace fs = std::filesystem;
    if (path.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(path.parent_path(), ec);
    }
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw Error("cannot open for writing: " + tmp.string());
        os << contents;
        if (!os.flush()) throw Error("write failed: " + tmp.string());
    }
    fs::rename(tmp, path);
}

std::string CsvTable::to_string() const {
    std::ostringstream os;
    for (const auto& [key, value] : metadata) os << "# " << key << "=" << value << "\n";
    for (std::size_t c = 0; c < columns.size(); ++c) {
        if (c) os << ',';
        os << columns[c];
    }
    os << '\n';
    for (const auto& row : rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c) os << ',';
            os << format_double(row[c]);
        }
        os << '\n';
    }
    return os.str();
}

CsvTable CsvTable::parse(std::istream& is) {
    CsvTable table;
    std::string line;
    bool have_header = false;
    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line.front() == '#') {
            std::string body = line.substr(1);
            if (!body.empty() && body.front() == ' ') body.erase(0, 1);
            auto eq = body.find('=');
            if (eq != std::string::npos) {
                table.metadata[body.substr(0, eq)] = body.substr(eq + 1);
            }
            continue;
        }
        if (!have_header) {
            table.columns = split(line, ',');
            have_header = true;
            continue;
        }
        auto cells = split(line, ',');
        std::vector<double> row;
        row.reserve(cells.size());
        for (const auto& cell : cells) row.push_back(parse_double(cell));
        table.rows.push_back(std::move(row));
    }
    return table;
}

CsvTable CsvTable::parse_string(const std::string& text) {
    std::istringstream is(text);
    return parse(is);
}

}  // namespace supercoh
