// Licensed under the Apache License, Version 2.0 (the "License"); you
// may not use this file except in compliance with the License.  You
// may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or
// implied.  See the License for the specific language governing
// permissions and limitations under the License.

#ifndef CSP_REPORT_HPP
#define CSP_REPORT_HPP

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace csp {

/// Shortest decimal representation that round-trips to the same double.
inline std::string shortest_decimal(double value) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    if (ec != std::errc{}) throw std::runtime_error("shortest_decimal: conversion failed");
    return std::string(buf, ptr);
}

/// Flat `key value` document, one pair per line, emitted in insertion order.
class ReportDoc {
public:
    void add(const std::string& key, double value) { rows_.emplace_back(key, shortest_decimal(value)); }
    void add(const std::string& key, int value) { rows_.emplace_back(key, std::to_string(value)); }
    void add(const std::string& key, long value) { rows_.emplace_back(key, std::to_string(value)); }
    void add(const std::string& key, bool value) { rows_.emplace_back(key, value ? "1" : "0"); }
    void add(const std::string& key, const std::string& value) { rows_.emplace_back(key, value); }

    std::string to_text() const {
        std::string out;
        for (const auto& [key, value] : rows_) {
            out += key;
            out += ' ';
            out += value;
            out += '\n';
        }
        return out;
    }

    void write(const std::filesystem::path& path) const {
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
        const std::string text = to_text();
        out.write(text.data(), static_cast<std::streamsize>(text.size()));
    }

private:
    std::vector<std::pair<std::string, std::string>> rows_;
};

}  // namespace csp

#endif  // CSP_REPORT_HPP
