// Copyright 2026 The hatemix Authors.
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

#include <cstddef>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace hatemix::csv {

struct Record {
    std::vector<std::string> fields;
    std::size_t line = 0;  // physical line on which the record starts (1-based)
};

// RFC 4180 reader: comma separated, double-quoted fields may contain commas,
// newlines and doubled quotes. A UTF-8 byte order mark is skipped. Throws
// MalformedCsv with the line number of the offending record.
std::vector<Record> read(std::istream& in);

std::string quote(std::string_view field);
void write_row(std::ostream& out, const std::vector<std::string>& fields);

}  // namespace hatemix::csv
