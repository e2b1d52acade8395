#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "ringcav/io.hpp"

namespace ringcav::io {

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

std::string quote(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
        if (c == '"') q += '"';
        q += c == '\n' ? ' ' : c;
    }
    return q + "\"";
}

}  // namespace

void CsvTable::add_row(const std::vector<double>& values) {
    std::vector<std::string> row;
    row.reserve(values.size());
    for (double v : values) row.push_back(format_double(v));
    rows.push_back(std::move(row));
}

std::string CsvTable::str() const {
    std::string out;
    for (const auto& [k, v] : preamble) out += "# " + k + "=" + v + "\n";
    auto line = [&out](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out += ',';
            out += quote(cells[i]);
        }
        out += '\n';
    };
    line(header);
    for (const auto& r : rows) {
        if (r.size() != header.size()) throw std::logic_error("CsvTable: row width differs from header");
        line(r);
    }
    return out;
}

CsvTable table_from_matrix(const std::vector<std::string>& header, const Eigen::MatrixXd& values) {
    if (Eigen::Index(header.size()) != values.cols()) throw std::invalid_argument("table_from_matrix: header width");
    CsvTable t;
    t.header = header;
    for (Eigen::Index r = 0; r < values.rows(); ++r) {
        std::vector<double> row(values.cols());
        for (Eigen::Index c = 0; c < values.cols(); ++c) row[std::size_t(c)] = values(r, c);
        t.add_row(row);
    }
    return t;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
    f << text;
    if (!f) throw std::runtime_error("failed writing " + path.string());
}

void write_csv(const std::filesystem::path& path, const CsvTable& table) { write_text(path, table.str()); }

}  // namespace ringcav::io
