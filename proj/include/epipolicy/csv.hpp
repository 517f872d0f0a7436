#pragma once

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "epipolicy/errors.hpp"

namespace epipolicy {

// Minimal comma-separated table. Fields are split on ',' with no quoting;
// the schemas used by this project never contain embedded commas.
struct CsvTable {
    std::string name;                            // path or label, for error messages
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;  // each row has header.size() cells
    std::vector<std::size_t> lines;              // 1-based source line per row
};

namespace detail {

inline std::vector<std::string> split_csv_line(std::string_view line) {
    std::vector<std::string> cells;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            cells.emplace_back(line.substr(start));
            break;
        }
        cells.emplace_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return cells;
}

}  // namespace detail

inline CsvTable read_csv_text(std::string_view text, std::string name) {
    CsvTable table;
    table.name = std::move(name);
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t eol = text.find('\n', pos);
        std::string_view line =
            eol == std::string_view::npos ? text.substr(pos) : text.substr(pos, eol - pos);
        pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty()) continue;
        auto cells = detail::split_csv_line(line);
        if (table.header.empty()) {
            table.header = std::move(cells);
            continue;
        }
        if (cells.size() != table.header.size()) {
            throw ParseError(table.name + ":" + std::to_string(line_no) + ": expected " +
                             std::to_string(table.header.size()) + " fields, got " +
                             std::to_string(cells.size()));
        }
        table.rows.push_back(std::move(cells));
        table.lines.push_back(line_no);
    }
    if (table.header.empty()) {
        throw ParseError(table.name + ": empty file, header row required");
    }
    return table;
}

inline CsvTable read_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return read_csv_text(buf.str(), path);
}

inline void expect_header(const CsvTable& table, const std::vector<std::string>& expected) {
    if (table.header != expected) {
        std::string want;
        for (const auto& h : expected) want += (want.empty() ? "" : ",") + h;
        std::string got;
        for (const auto& h : table.header) got += (got.empty() ? "" : ",") + h;
        throw ParseError(table.name + ": header mismatch, expected '" + want + "' got '" + got +
                         "'");
    }
}

// Shortest decimal string that round-trips to the same double.
inline std::string format_double(double value) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    (void)ec;
    return std::string(buf, ptr);
}

inline double parse_double(std::string_view cell, const std::string& where) {
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
    if (ec != std::errc() || ptr != cell.data() + cell.size()) {
        throw ParseError(where + ": bad number '" + std::string(cell) + "'");
    }
    return value;
}

inline std::int64_t parse_count(std::string_view cell, const std::string& where) {
    std::int64_t value = 0;
    auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
    if (ec != std::errc() || ptr != cell.data() + cell.size()) {
        throw ParseError(where + ": bad count '" + std::string(cell) + "'");
    }
    if (value < 0) throw ParseError(where + ": negative count '" + std::string(cell) + "'");
    return value;
}

inline void write_text_file(const std::string& path, std::string_view content) {
    std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write '" + path + "'");
    out << content;
    if (!out) throw ConfigError("write failed for '" + path + "'");
}

}  // namespace epipolicy
