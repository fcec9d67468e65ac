#include "fracdose/csv.hpp"

#include <charconv>
#include <fstream>
#include <stdexcept>
#include <system_error>

namespace fracdose::csv {

std::string format_double(double value) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

double parse_double(std::string_view text) {
    double value = 0.0;
    auto res = std::from_chars(text.data(), text.data() + text.size(), value);
    if (res.ec != std::errc{}) {
        throw std::runtime_error("csv: cannot parse number: '" + std::string(text) + "'");
    }
    return value;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> fields;
    size_t start = 0;
    while (true) {
        size_t pos = line.find(sep, start);
        if (pos == std::string_view::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return fields;
}

Table Table::read(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("csv: cannot open " + path.string());
    }
    Table table;
    std::string line;
    bool have_header = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        if (!have_header) {
            for (auto f : split(line)) table.header.emplace_back(f);
            have_header = true;
            continue;
        }
        std::vector<double> row;
        for (auto f : split(line)) row.push_back(parse_double(f));
        if (row.size() != table.header.size()) {
            throw std::runtime_error("csv: ragged row in " + path.string());
        }
        table.rows.push_back(std::move(row));
    }
    if (!have_header) {
        throw std::runtime_error("csv: empty file " + path.string());
    }
    return table;
}

int Table::column(std::string_view name) const {
    for (size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) return static_cast<int>(i);
    }
    return -1;
}

}  // namespace fracdose::csv
