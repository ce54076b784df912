#pragma once
// Small shared helpers: hashing, whitespace normalization, UTF-8 length,
// canonical number formatting.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace tscg {

inline std::string fnv1a64_hex(const std::string& data) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ull;
    }
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[i] = digits[h & 0xf];
        h >>= 4;
    }
    return out;
}

inline std::string to_lower_ascii(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return s;
}

inline bool is_space_char(unsigned char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

// Collapse whitespace runs to a single space and trim both ends. Descriptions
// pass through this once at parse time so downstream passes see one spacing.
inline std::string collapse_whitespace(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    bool pending_space = false;
    for (unsigned char c : s) {
        if (is_space_char(c)) {
            pending_space = !out.empty();
        } else {
            if (pending_space) out.push_back(' ');
            pending_space = false;
            out.push_back(static_cast<char>(c));
        }
    }
    return out;
}

inline std::string rtrim(std::string s) {
    while (!s.empty() && is_space_char(static_cast<unsigned char>(s.back()))) s.pop_back();
    return s;
}

// Number of Unicode code points; bytes that are not valid UTF-8 lead bytes
// count as one code point each, which keeps the measure total.
inline std::size_t utf8_length(const std::string& s) {
    std::size_t n = 0;
    for (unsigned char c : s)
        if ((c & 0xC0) != 0x80) ++n;
    return n;
}

// Shortest round-trip decimal for a double, integral values without a dot.
// Matches the JSON serializer so bounds and metric values format one way
// everywhere.
inline std::string canonical_number(double v) {
    if (std::floor(v) == v && std::fabs(v) < 9007199254740992.0)  // 2^53
        return std::to_string(static_cast<long long>(v));
    return nlohmann::json(v).dump();
}

inline std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t nl = text.find('\n', start);
        if (nl == std::string::npos) {
            lines.push_back(text.substr(start));
            break;
        }
        lines.push_back(text.substr(start, nl - start));
        start = nl + 1;
    }
    return lines;
}

}  // namespace tscg
