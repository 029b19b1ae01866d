#ifndef BDMS_IO_UTIL_HPP
#define BDMS_IO_UTIL_HPP

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace bdms::io {

// Shortest round-trip decimal representation; stable across runs, so files
// built from identical inputs compare byte-identical.
std::string format_double(double v);

void append_double(std::string& out, double v);

// Writes to "<path>.partial" first, then renames onto the final path.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

std::string read_file(const std::filesystem::path& path);

// Minimal CSV: no quoting (none of our fields contain commas).
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    int column(std::string_view name) const;  // -1 if absent
};

CsvTable parse_csv(std::string_view text);

double parse_double(std::string_view s);
std::int64_t parse_int(std::string_view s);

}  // namespace bdms::io

#endif
