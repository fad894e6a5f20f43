#include "wpcurve/csv.hpp"

#include "wpcurve/error.hpp"

#include <cmath>
#include <fstream>

namespace wpc {

std::vector<std::string> splitCsvLine(const std::string& line, char delim) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur.push_back(c);
            }
        } else if (c == '"' && cur.empty()) {
            quoted = true;
        } else if (c == delim) {
            fields.push_back(std::move(cur));
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    fields.push_back(std::move(cur));
    return fields;
}

CsvTable readCsvFile(const std::string& path, char delim) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open CSV file: " + path);

    CsvTable table;
    std::string line;
    if (!std::getline(in, line)) throw DataError("CSV file is empty: " + path);
    table.headers = splitCsvLine(line, delim);

    while (std::getline(in, line)) {
        if (line.empty()) continue;
        table.rows.push_back(splitCsvLine(line, delim));
    }
    return table;
}

std::optional<double> parseDouble(const std::string& text) {
    std::size_t begin = text.find_first_not_of(" \t");
    if (begin == std::string::npos) return std::nullopt;
    std::size_t end = text.find_last_not_of(" \t") + 1;

    double value = 0.0;
    const char* first = text.data() + begin;
    const char* last = text.data() + end;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last) return std::nullopt;
    if (!std::isfinite(value)) return std::nullopt;
    return value;
}

std::string formatDouble(double value) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    if (ec != std::errc{}) return "nan";
    return {buf, ptr};
}

} // namespace wpc
