#pragma once

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "qdc/errors.hpp"

namespace qdc {

// Locale-independent number text.
namespace fmt {

// 15 significant digits in scientific notation: CSV cells.
inline std::string sci(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::scientific, 14);
    if (ec != std::errc{}) throw std::runtime_error("number formatting failed");
    return {buf, end};
}

// Shortest text that parses back to the same double: config values.
inline std::string shortest(double v) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc{}) throw std::runtime_error("number formatting failed");
    return {buf, end};
}

}  // namespace fmt

inline double parse_double(std::string_view text, std::string_view what) {
    double v = 0.0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    if (!text.empty() && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr != last || text.empty()) {
        throw ConfigError(std::string(what) + ": '" + std::string(text) + "' is not a number");
    }
    if (!std::isfinite(v)) throw ConfigError(std::string(what) + ": value must be finite");
    return v;
}

inline unsigned long long parse_unsigned(std::string_view text, std::string_view what) {
    unsigned long long v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
        throw ConfigError(std::string(what) + ": '" + std::string(text) +
                          "' is not a non-negative integer");
    }
    return v;
}

inline std::string_view trim(std::string_view s) {
    const auto ws = " \t\r\n";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        out.push_back(trim(s.substr(start, pos == std::string_view::npos ? pos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

inline std::vector<double> parse_double_list(std::string_view text, std::string_view what) {
    std::vector<double> out;
    for (auto item : split(text, ',')) out.push_back(parse_double(item, what));
    return out;
}

class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

inline void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open '" + path.string() + "' for writing");
    f << content;
    f.close();
    if (!f) throw IoError("failed writing '" + path.string() + "'");
}

inline std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

// Output path siblings: "runs/fig2a.csv" + ".summary.json" -> "runs/fig2a.summary.json".
inline std::filesystem::path sibling_path(const std::filesystem::path& out, const std::string& suffix) {
    std::filesystem::path stem = out;
    stem.replace_extension();
    return std::filesystem::path(stem.string() + suffix);
}

inline void require_writable_parent(const std::filesystem::path& out) {
    const auto parent = out.has_parent_path() ? out.parent_path() : std::filesystem::path(".");
    std::error_code ec;
    if (!std::filesystem::is_directory(parent, ec)) {
        throw IoError("output directory '" + parent.string() + "' does not exist");
    }
}

}  // namespace qdc
