#pragma once

#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "aqc/io/format.hpp"

namespace aqc::io {

/// CSV emitter with the reproducibility header block every output file
/// carries: config hash, master seed, code version and column units as
/// comment lines. Doubles are written in shortest round-trip form.
class CsvWriter {
  public:
    CsvWriter(std::ostream& out, std::string config_hash, std::uint64_t seed,
              std::string code_version, std::vector<std::string> columns,
              std::vector<std::string> units = {})
        : out_(out), n_columns_(columns.size()) {
        out_ << "# config_hash=" << config_hash << "\n";
        out_ << "# seed=" << seed << "\n";
        out_ << "# version=" << code_version << "\n";
        if (!units.empty()) {
            out_ << "# units=";
            join(units);
            out_ << "\n";
        }
        join(columns);
        out_ << "\n";
    }

    template <typename... Ts>
    void row(const Ts&... fields) {
        if (sizeof...(fields) != n_columns_) {
            throw std::logic_error("CsvWriter: field count != column count");
        }
        bool first = true;
        ((out_ << (first ? "" : ","), first = false, write_field(fields)), ...);
        out_ << "\n";
    }

    void comment(const std::string& text) { out_ << "# " << text << "\n"; }

  private:
    void write_field(double v) { out_ << format_double(v); }
    void write_field(int v) { out_ << v; }
    void write_field(std::uint64_t v) { out_ << v; }
    void write_field(std::int64_t v) { out_ << v; }
    void write_field(const std::string& v) { out_ << v; }
    void write_field(const char* v) { out_ << v; }

    void join(const std::vector<std::string>& items) {
        for (std::size_t i = 0; i < items.size(); ++i) {
            if (i) out_ << ",";
            out_ << items[i];
        }
    }

    std::ostream& out_;
    std::size_t n_columns_;
};

/// Minimal reader for the files CsvWriter emits (comments skipped, first
/// non-comment line is the column header).
struct CsvTable {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    int column_index(const std::string& name) const {
        for (std::size_t i = 0; i < columns.size(); ++i) {
            if (columns[i] == name) return static_cast<int>(i);
        }
        throw std::invalid_argument("CsvTable: no column named " + name);
    }

    double number(std::size_t row, const std::string& column) const {
        return std::stod(rows[row][column_index(column)]);
    }
};

inline CsvTable read_csv(std::istream& in) {
    CsvTable table;
    std::string line;
    bool have_header = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> fields;
        std::string field;
        std::istringstream ls(line);
        while (std::getline(ls, field, ',')) fields.push_back(field);
        if (!have_header) {
            table.columns = std::move(fields);
            have_header = true;
        } else {
            table.rows.push_back(std::move(fields));
        }
    }
    return table;
}

inline CsvTable read_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    return read_csv(in);
}

} // namespace aqc::io
