// Copyright 2026 The shiftbench Authors.
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

#pragma once

// Shared JSON Lines plumbing for the record readers.

#include <array>
#include <cmath>
#include <cstddef>
#include <iterator>
#include <istream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "shiftbench/error.hpp"
#include "shiftbench/parallel.hpp"

namespace shiftbench::jsonl {

using Json = nlohmann::json;

struct Line {
  std::size_t number;  // 1-based
  std::string_view text;
};

inline bool is_blank(std::string_view s) {
  for (char c : s) {
    if (c != ' ' && c != '\t' && c != '\r') return false;
  }
  return true;
}

inline std::vector<Line> split_lines(std::string_view text) {
  std::vector<Line> lines;
  std::size_t number = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    const std::size_t end = nl == std::string_view::npos ? text.size() : nl;
    ++number;
    std::string_view line = text.substr(pos, end - pos);
    if (!is_blank(line)) lines.push_back({number, line});
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
  return lines;
}

inline std::string slurp(std::istream& in) {
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

// Parses each line with `decode(json, line_number)` in fixed-size chunks.
template <typename T, typename Decode>
std::vector<T> parse_lines(std::string_view text, std::size_t threads, Decode decode) {
  const std::vector<Line> lines = split_lines(text);
  constexpr std::size_t kChunk = 4096;
  const std::size_t chunks = (lines.size() + kChunk - 1) / kChunk;
  std::vector<std::vector<T>> parts(chunks);
  parallel_for(chunks, threads, [&](std::size_t c) {
    const std::size_t lo = c * kChunk;
    const std::size_t hi = std::min(lines.size(), lo + kChunk);
    auto& out = parts[c];
    out.reserve(hi - lo);
    for (std::size_t i = lo; i < hi; ++i) {
      Json j;
      try {
        j = Json::parse(lines[i].text);
      } catch (const Json::parse_error& e) {
        throw ParseError(lines[i].number, std::string("malformed JSON: ") + e.what());
      }
      if (!j.is_object()) throw ParseError(lines[i].number, "expected a JSON object");
      try {
        out.push_back(decode(j));
      } catch (const ParseError&) {
        throw;
      } catch (const Error& e) {
        throw ParseError(lines[i].number, e.what());
      }
    }
  });
  std::vector<T> all;
  all.reserve(lines.size());
  for (auto& p : parts) {
    for (auto& r : p) all.push_back(std::move(r));
  }
  return all;
}

inline const Json& require(const Json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) throw ValidationError(std::string("missing field '") + key + "'");
  return *it;
}

inline std::string get_string(const Json& j, const char* key) {
  const Json& v = require(j, key);
  if (!v.is_string()) throw ValidationError(std::string("field '") + key + "' must be a string");
  return v.get<std::string>();
}

inline long long get_int(const Json& v, const char* key) {
  if (v.is_number_integer()) return v.get<long long>();
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (std::isfinite(d) && d == std::floor(d) && std::abs(d) < 9e15) return static_cast<long long>(d);
  }
  throw ValidationError(std::string("field '") + key + "' must be an integer");
}

inline int get_int_field(const Json& j, const char* key) {
  const long long v = get_int(require(j, key), key);
  if (v < -2147483647LL || v > 2147483647LL)
    throw ValidationError(std::string("field '") + key + "' out of range");
  return static_cast<int>(v);
}

inline bool get_bool_or(const Json& j, const char* key, bool fallback) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return fallback;
  if (!it->is_boolean()) throw ValidationError(std::string("field '") + key + "' must be a boolean");
  return it->get<bool>();
}

inline double get_number(const Json& v, const char* key) {
  if (!v.is_number()) throw ValidationError(std::string("field '") + key + "' must contain numbers");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw ValidationError(std::string("field '") + key + "' is not finite");
  return d;
}

inline std::vector<double> get_number_array(const Json& v, const char* key) {
  if (!v.is_array()) throw ValidationError(std::string("field '") + key + "' must be an array");
  std::vector<double> out;
  out.reserve(v.size());
  for (const Json& e : v) out.push_back(get_number(e, key));
  return out;
}

inline std::array<double, 4> get_box(const Json& v, const char* key) {
  const std::vector<double> a = get_number_array(v, key);
  if (a.size() != 4) throw ValidationError(std::string("field '") + key + "' must have 4 numbers");
  return {a[0], a[1], a[2], a[3]};
}

inline bool has(const Json& j, const char* key) {
  auto it = j.find(key);
  return it != j.end() && !it->is_null();
}

}  // namespace shiftbench::jsonl
