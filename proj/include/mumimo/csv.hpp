// SPDX-License-Identifier: Apache-2.0
//
// RFC 4180 CSV output with '#' comment lines ahead of the header row.
// Doubles are written with 17 significant digits.

#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace mumimo::csv {

std::string format_double(double v);
std::string quote(const std::string& field);

class Table {
public:
    explicit Table(std::vector<std::string> columns);

    void add_comment(const std::string& line);

    class Row {
    public:
        Row& operator<<(const std::string& s);
        Row& operator<<(const char* s);
        Row& operator<<(double v);
        Row& operator<<(long long v);
        Row& operator<<(int v);
        ~Row();

        Row(const Row&) = delete;
        Row& operator=(const Row&) = delete;

    private:
        friend class Table;
        explicit Row(Table& t) : table_(t) {}
        Table& table_;
        std::vector<std::string> cells_;
    };

    Row row() { return Row(*this); }
    void add_row(std::vector<std::string> cells);

    std::size_t size() const { return rows_.size(); }
    void write(std::ostream& out) const;
    // Writes to a file, creating parent directories.
    void write_file(const std::string& path) const;

private:
    std::vector<std::string> comments_;
    std::vector<std::string> columns_;
    std::vector<std::vector<std::string>> rows_;
};

}  // namespace mumimo::csv
