// Copyright 2026 The pacache Authors
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

#include "pacache/csv.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>

namespace pacache {

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (v == 0.0) return "0";  // folds -0
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

CsvWriter::CsvWriter(const std::filesystem::path& path) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
    }
    out_.open(path, std::ios::binary | std::ios::trunc);
    if (!out_) throw std::runtime_error("cannot open for writing: " + path.string());
}

void CsvWriter::header(std::initializer_list<std::string_view> columns) {
    for (auto c : columns) field(c);
    end_row();
}

void CsvWriter::header(const std::vector<std::string>& columns) {
    for (const auto& c : columns) field(std::string_view(c));
    end_row();
}

CsvWriter& CsvWriter::field(std::string_view v) {
    if (row_started_) out_ << ',';
    out_ << v;
    row_started_ = true;
    return *this;
}

CsvWriter& CsvWriter::field(double v) { return field(std::string_view(format_double(v))); }
CsvWriter& CsvWriter::field(long long v) { return field(std::string_view(std::to_string(v))); }
CsvWriter& CsvWriter::field(unsigned long long v) { return field(std::string_view(std::to_string(v))); }

void CsvWriter::end_row() {
    out_ << '\n';
    row_started_ = false;
    if (!out_) throw std::runtime_error("write failed");
}

}  // namespace pacache
