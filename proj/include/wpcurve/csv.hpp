#pragma once

#include <charconv>
#include <optional>
#include <string>
#include <vector>

namespace wpc {

/// Splits one CSV line. Handles double-quoted fields with embedded delimiters
/// and doubled quotes; embedded newlines are not supported (the SCADA exports
/// never contain them).
std::vector<std::string> splitCsvLine(const std::string& line, char delim = ',');

/// Whole-file table for small inputs (nominal curves, configs' neighbours).
/// Large SCADA files are streamed by the loader instead.
struct CsvTable {
    std::vector<std::string> headers;
    std::vector<std::vector<std::string>> rows;
};

CsvTable readCsvFile(const std::string& path, char delim = ',');

/// Locale-independent double parse; empty/garbage -> nullopt.
std::optional<double> parseDouble(const std::string& text);

/// Round-trippable textual form of a double (shortest form that parses back
/// bit-exactly), used for every numeric cell we write so artifacts are
/// byte-stable across runs.
std::string formatDouble(double value);

} // namespace wpc
