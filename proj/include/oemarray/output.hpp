#pragma once

// Deterministic file output: CSV with a header row, comma delimiter,
// 12 significant digits and LF line endings; JSON pretty-printed.

#include <filesystem>
#include <initializer_list>
#include <string>
#include <vector>

#include <json.hpp>

namespace oem {

// "%.12g"; nan and inf are written as "nan", "inf", "-inf".
std::string format_number(double x);

class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header);

    void add_row(std::vector<double> row);
    void add_row(std::initializer_list<double> row) { add_row(std::vector<double>(row)); }

    std::size_t rows() const { return rows_.size(); }
    const std::vector<std::string>& header() const { return header_; }
    std::string str() const;
    void write(const std::filesystem::path& path) const;

private:
    std::vector<std::string> header_;
    std::vector<std::vector<double>> rows_;
};

void write_text(const std::filesystem::path& path, const std::string& text);
void write_json(const std::filesystem::path& path, const nlohmann::json& j);

}  // namespace oem
