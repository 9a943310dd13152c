#pragma once

#include <cstdint>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace lobsim {

/// Minimal reader for the numeric CSV files this project exchanges. Lines
/// starting with '#' are comments (used for seed/provenance header rows).
class CsvReader {
public:
    /// Throws IoError if the file cannot be opened or the header differs
    /// from `expected_header`.
    CsvReader(const std::string& path, std::initializer_list<std::string_view> expected_header);
    CsvReader(const std::string& path, const std::vector<std::string>& expected_header);

    /// Fields of the next data row; views stay valid until the next call.
    std::optional<std::vector<std::string_view>> next();

    std::size_t line() const noexcept { return line_no_; }
    const std::string& path() const noexcept { return path_; }

private:
    void open(const std::vector<std::string>& expected);

    std::string path_;
    std::ifstream in_;
    std::string buf_;
    std::size_t line_no_ = 0;
};

std::vector<std::string_view> split_csv_line(std::string_view line);

std::optional<std::int64_t> try_parse_int(std::string_view text) noexcept;
std::optional<double> try_parse_double(std::string_view text) noexcept;

/// Throwing variants that name the file and line.
std::int64_t parse_int(std::string_view text, const CsvReader& at);
double parse_double(std::string_view text, const CsvReader& at);

/// Opens `path` for writing or throws IoError.
std::ofstream open_output(const std::string& path);

}  // namespace lobsim
