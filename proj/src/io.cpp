// Copyright 2025 the qsense authors
// SPDX-License-Identifier: Apache-2.0

#include "qsense/io.hpp"

#include <charconv>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace qsense::io {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (const char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  const auto emit = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) f << ',';
      f << csv_escape(cells[i]);
    }
    f << "\r\n";
  };
  emit(header);
  for (const auto& row : rows) {
    if (row.size() != header.size())
      throw std::runtime_error("csv row width does not match header");
    emit(row);
  }
}

void write_json_file(const std::string& path, const json& j) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  f << j.dump(2) << '\n';
}

json read_json_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path);
  return json::parse(f);
}

json rvec_to_json(const RVec& v) {
  json arr = json::array();
  for (int i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

RVec rvec_from_json(const json& j) {
  if (!j.is_array()) throw std::runtime_error("expected a JSON array of numbers");
  RVec v(static_cast<int>(j.size()));
  int i = 0;
  for (const auto& x : j) v[i++] = x.get<double>();
  return v;
}

std::string params_hash(const RVec& flat) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (int i = 0; i < flat.size(); ++i) {
    std::uint64_t bits;
    static_assert(sizeof(bits) == sizeof(double));
    std::memcpy(&bits, &flat[i], sizeof(bits));
    for (int b = 0; b < 8; ++b) {
      h ^= (bits >> (8 * b)) & 0xff;
      h *= 0x100000001b3ull;
    }
  }
  char buf[17];
  for (int i = 15; i >= 0; --i) {
    buf[i] = "0123456789abcdef"[h & 0xf];
    h >>= 4;
  }
  buf[16] = '\0';
  return std::string(buf);
}

}  // namespace qsense::io
