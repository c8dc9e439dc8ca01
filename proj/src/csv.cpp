// SPDX-License-Identifier: Apache-2.0

#include "mumimo/csv.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace mumimo::csv {

std::string format_double(double v) {
    if (std::isnan(v)) {
        return "nan";
    }
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string quote(const std::string& field) {
    const bool needs = field.find_first_of(",\"\r\n") != std::string::npos ||
                       (!field.empty() && (field.front() == ' ' || field.back() == ' '));
    if (!needs) {
        return field;
    }
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') {
            out += '"';
        }
        out += c;
    }
    out += '"';
    return out;
}

Table::Table(std::vector<std::string> columns) : columns_(std::move(columns)) {
    if (columns_.empty()) {
        throw std::invalid_argument("csv::Table: no columns");
    }
}

void Table::add_comment(const std::string& line) {
    if (line.find_first_of("\r\n") != std::string::npos) {
        throw std::invalid_argument("csv::Table: comment lines must not contain line breaks");
    }
    comments_.push_back(line);
}

Table::Row& Table::Row::operator<<(const std::string& s) {
    cells_.push_back(s);
    return *this;
}

Table::Row& Table::Row::operator<<(const char* s) { return *this << std::string(s); }

Table::Row& Table::Row::operator<<(double v) { return *this << format_double(v); }

Table::Row& Table::Row::operator<<(long long v) { return *this << std::to_string(v); }

Table::Row& Table::Row::operator<<(int v) { return *this << std::to_string(v); }

Table::Row::~Row() { table_.rows_.push_back(std::move(cells_)); }

void Table::add_row(std::vector<std::string> cells) {
    if (cells.size() != columns_.size()) {
        throw std::invalid_argument("csv::Table: row width does not match header");
    }
    rows_.push_back(std::move(cells));
}

void Table::write(std::ostream& out) const {
    for (const auto& c : comments_) {
        out << "# " << c << "\r\n";
    }
    auto line = [&](const std::vector<std::string>& cells) {
        for (std::size_t j = 0; j < cells.size(); ++j) {
            if (j > 0) {
                out << ',';
            }
            out << quote(cells[j]);
        }
        out << "\r\n";
    };
    line(columns_);
    for (const auto& r : rows_) {
        if (r.size() != columns_.size()) {
            throw std::logic_error("csv::Table: row width does not match header");
        }
        line(r);
    }
}

void Table::write_file(const std::string& path) const {
    const std::filesystem::path p(path);
    if (p.has_parent_path()) {
        std::filesystem::create_directories(p.parent_path());
    }
    std::ofstream out(p, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot open " + path + " for writing");
    }
    write(out);
    if (!out) {
        throw std::runtime_error("failed writing " + path);
    }
}

}  // namespace mumimo::csv
