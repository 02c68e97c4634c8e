#pragma once

#include <charconv>
#include <string>
#include <string_view>

namespace codeevo::detail {

/// Shortest text that reads back to the same double.
inline std::string format_shortest(double v) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    std::string s(buf, end);
    if (s == "-0") s = "0";
    return s;
}

/// Fixed notation with `digits` decimals; negative zero prints unsigned.
inline std::string format_fixed(double v, int digits) {
    char buf[512];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, digits);
    std::string s(buf, end);
    if (s.front() == '-' && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
    return s;
}

/// Quotes a CSV field when it contains a separator, quote or line break.
inline std::string csv_field(std::string_view text) {
    if (text.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(text);
    std::string out = "\"";
    for (char c : text) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

}  // namespace codeevo::detail
