// Copyright 2026 The adjplan Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Minimal comma-separated I/O: shortest round-trip number formatting and a
// header-checked line reader.

#pragma once

#include <charconv>
#include <istream>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace adjplan::csv {

/// Shortest decimal representation that parses back to the same double.
inline std::string num(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline double to_double(std::string_view s) {
  double v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw std::runtime_error("csv: bad number '" + std::string(s) + "'");
  return v;
}

inline long to_long(std::string_view s) {
  long v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw std::runtime_error("csv: bad integer '" + std::string(s) + "'");
  return v;
}

inline std::vector<std::string> split(std::string_view line) {
  std::vector<std::string> out;
  size_t start = 0;
  while (true) {
    size_t pos = line.find(',', start);
    out.emplace_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

class Reader {
 public:
  Reader(std::istream& is, const std::vector<std::string>& expected_header) : is_(is) {
    std::string line;
    if (!std::getline(is_, line)) throw std::runtime_error("csv: missing header");
    strip(line);
    if (split(line) != expected_header) throw std::runtime_error("csv: unexpected header '" + line + "'");
    width_ = expected_header.size();
  }

  std::optional<std::vector<std::string>> next() {
    std::string line;
    while (std::getline(is_, line)) {
      strip(line);
      if (line.empty()) continue;
      auto fields = split(line);
      if (fields.size() != width_) throw std::runtime_error("csv: wrong field count in '" + line + "'");
      return fields;
    }
    return std::nullopt;
  }

 private:
  static void strip(std::string& line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
  }

  std::istream& is_;
  size_t width_ = 0;
};

}  // namespace adjplan::csv
