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

#pragma once

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

namespace pacache {

/// Shortest decimal text that parses back to exactly `v`.
[[nodiscard]] std::string format_double(double v);

/// Minimal CSV writer. Fields are written verbatim; callers keep them free of commas.
class CsvWriter {
public:
    /// Creates parent directories; throws std::runtime_error if the file cannot be opened.
    explicit CsvWriter(const std::filesystem::path& path);

    void header(std::initializer_list<std::string_view> columns);
    void header(const std::vector<std::string>& columns);

    CsvWriter& field(std::string_view v);
    CsvWriter& field(double v);
    CsvWriter& field(long long v);
    CsvWriter& field(unsigned long long v);
    CsvWriter& field(int v) { return field(static_cast<long long>(v)); }
    CsvWriter& field(unsigned v) { return field(static_cast<unsigned long long>(v)); }
    CsvWriter& field(unsigned long v) { return field(static_cast<unsigned long long>(v)); }
    CsvWriter& field(long v) { return field(static_cast<long long>(v)); }
    void end_row();

private:
    std::ofstream out_;
    bool row_started_ = false;
};

}  // namespace pacache
