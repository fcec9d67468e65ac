#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace fracdose::csv {

// Shortest round-trip representation (std::to_chars); locale-independent,
// so repeated runs emit byte-identical files.
std::string format_double(double value);

double parse_double(std::string_view text);

std::vector<std::string_view> split(std::string_view line, char sep = ',');

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    static Table read(const std::filesystem::path& path);
    int column(std::string_view name) const;  // -1 if absent
};

}  // namespace fracdose::csv
