#include "lobsim/data/csv.hpp"

#include <charconv>
#include <cstdlib>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "lobsim/core/types.hpp"

namespace lobsim {

std::vector<std::string_view> split_csv_line(std::string_view line) {
    std::vector<std::string_view> out;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    std::size_t start = 0;
    while (true) {
        auto comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return out;
}

CsvReader::CsvReader(const std::string& path, std::initializer_list<std::string_view> expected_header)
    : path_(path) {
    std::vector<std::string> expected(expected_header.begin(), expected_header.end());
    open(expected);
}

CsvReader::CsvReader(const std::string& path, const std::vector<std::string>& expected_header) : path_(path) {
    open(expected_header);
}

void CsvReader::open(const std::vector<std::string>& expected) {
    in_.open(path_);
    if (!in_) throw IoError(fmt::format("cannot open '{}'", path_));
    while (std::getline(in_, buf_)) {
        ++line_no_;
        if (!buf_.empty() && buf_[0] == '#') continue;
        auto fields = split_csv_line(buf_);
        bool match = fields.size() == expected.size();
        for (std::size_t i = 0; match && i < fields.size(); ++i) match = fields[i] == expected[i];
        if (!match) {
            throw IoError(fmt::format("'{}': header '{}' does not match expected '{}'", path_, buf_,
                                      fmt::join(expected, ",")));
        }
        return;
    }
    throw IoError(fmt::format("'{}': missing header", path_));
}

std::optional<std::vector<std::string_view>> CsvReader::next() {
    while (std::getline(in_, buf_)) {
        ++line_no_;
        if (buf_.empty() || buf_ == "\r" || buf_[0] == '#') continue;
        return split_csv_line(buf_);
    }
    return std::nullopt;
}

std::optional<std::int64_t> try_parse_int(std::string_view text) noexcept {
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size()) return std::nullopt;
    return v;
}

std::optional<double> try_parse_double(std::string_view text) noexcept {
    // libstdc++ 11 lacks floating-point from_chars.
    std::string tmp(text);
    if (tmp.empty()) return std::nullopt;
    char* end = nullptr;
    double v = std::strtod(tmp.c_str(), &end);
    if (end != tmp.c_str() + tmp.size()) return std::nullopt;
    return v;
}

std::int64_t parse_int(std::string_view text, const CsvReader& at) {
    auto v = try_parse_int(text);
    if (!v) throw IoError(fmt::format("{}:{}: expected integer, got '{}'", at.path(), at.line(), text));
    return *v;
}

double parse_double(std::string_view text, const CsvReader& at) {
    auto v = try_parse_double(text);
    if (!v) throw IoError(fmt::format("{}:{}: expected number, got '{}'", at.path(), at.line(), text));
    return *v;
}

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError(fmt::format("cannot write '{}'", path));
    return out;
}

}  // namespace lobsim
