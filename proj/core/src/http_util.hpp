// Copyright 2026 The Foresight Authors
// SPDX-License-Identifier: Apache-2.0

// Private helpers shared by the HTTP-facing modules.

#pragma once

#include <cctype>
#include <string>
#include <string_view>

namespace foresight::detail {

/// "https://host:8080/v1/x" -> origin "https://host:8080", path "/v1/x".
struct SplitUrl {
    std::string origin;
    std::string path;
};

inline SplitUrl split_url(std::string_view url) {
    const auto scheme_end = url.find("://");
    const auto host_start = scheme_end == std::string_view::npos ? 0 : scheme_end + 3;
    const auto slash = url.find('/', host_start);
    if (slash == std::string_view::npos) return {std::string(url), ""};
    std::string path(url.substr(slash));
    while (path.size() > 1 && path.back() == '/') path.pop_back();
    if (path == "/") path.clear();
    return {std::string(url.substr(0, slash)), path};
}

inline std::string url_encode(std::string_view s) {
    static constexpr char hex[] = "0123456789ABCDEF";
    std::string out;
    out.reserve(s.size() * 3);
    for (unsigned char c : s) {
        if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~') {
            out += static_cast<char>(c);
        } else {
            out += '%';
            out += hex[c >> 4];
            out += hex[c & 15];
        }
    }
    return out;
}

}  // namespace foresight::detail
