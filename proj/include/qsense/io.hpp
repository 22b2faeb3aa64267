// Copyright 2025 the qsense authors
// SPDX-License-Identifier: Apache-2.0
//
// Result persistence: RFC-4180 CSV emission with shortest round-trip
// numeric formatting, JSON file helpers, and a stable parameter hash for
// reproducibility stamps.

#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "qsense/types.hpp"

namespace qsense::io {

using json = nlohmann::ordered_json;

// Shortest decimal form that parses back to the same double.
std::string format_double(double v);

// Quotes a field if it contains a comma, quote, or line break.
std::string csv_escape(const std::string& field);

// RFC-4180: comma separated, CRLF line endings, header first.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);

void write_json_file(const std::string& path, const json& j);
json read_json_file(const std::string& path);

json rvec_to_json(const RVec& v);
RVec rvec_from_json(const json& j);

// FNV-1a over the raw bytes of the flat parameter vector, as 16 hex digits.
std::string params_hash(const RVec& flat);

}  // namespace qsense::io
