// CSV output with round-trip precision

#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace ringcav::io {

/// %.17g formatting; "nan", "inf", "-inf" for non-finite values.
std::string format_double(double v);

struct CsvTable {
    std::vector<std::pair<std::string, std::string>> preamble;  // written as "# key=value" lines
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    void add_row(const std::vector<double>& values);
    std::string str() const;
};

CsvTable table_from_matrix(const std::vector<std::string>& header, const Eigen::MatrixXd& values);

void write_text(const std::filesystem::path& path, const std::string& text);
void write_csv(const std::filesystem::path& path, const CsvTable& table);

}  // namespace ringcav::io
