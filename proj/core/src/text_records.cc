//
// Copyright 2026 The trajaudit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include "trajaudit/text_records.h"

#include <charconv>
#include <cmath>
#include <sstream>

#include "trajaudit/error.h"

namespace trajaudit {

std::string format_real(double value) {
  char buffer[64];
  auto result = std::to_chars(buffer, buffer + sizeof(buffer), value,
                              std::chars_format::general, 17);
  return std::string(buffer, result.ptr);
}

std::string format_shortest(double value) {
  char buffer[64];
  auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, result.ptr);
}

void write_reals(std::ostream& out, std::span<const double> values) {
  for (double v : values) out << ' ' << format_real(v);
}

std::optional<Record> RecordReader::next() {
  std::string text;
  while (std::getline(in_, text)) {
    ++line_;
    std::istringstream tokens(text);
    Record record{line_, {}};
    std::string token;
    while (tokens >> token) record.tokens.push_back(token);
    if (record.tokens.empty() || record.tokens.front().starts_with('#')) {
      continue;
    }
    return record;
  }
  return std::nullopt;
}

Record RecordReader::expect(std::string_view kind) {
  auto record = next();
  if (!record) {
    fail(line_, "unexpected end of input, expected '" + std::string(kind) +
                    "' record");
  }
  if (record->kind() != kind) {
    fail(*record, "expected '" + std::string(kind) + "' record, found '" +
                      record->kind() + "'");
  }
  return *std::move(record);
}

void RecordReader::fail(const Record& record, const std::string& what) const {
  fail(record.line, what);
}

void RecordReader::fail(std::size_t line, const std::string& what) const {
  throw ParseError(source_, line, what);
}

double RecordReader::real(const Record& record, std::size_t index) const {
  if (index >= record.size()) fail(record, "missing value");
  const std::string& token = record.tokens[index];
  double value = 0.0;
  auto [ptr, ec] =
      std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size()) {
    fail(record, "not a number: '" + token + "'");
  }
  if (!std::isfinite(value)) fail(record, "non-finite value: '" + token + "'");
  return value;
}

std::uint64_t RecordReader::unsigned_integer(const Record& record,
                                             std::size_t index) const {
  if (index >= record.size()) fail(record, "missing value");
  const std::string& token = record.tokens[index];
  std::uint64_t value = 0;
  auto [ptr, ec] =
      std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size()) {
    fail(record, "not a non-negative integer: '" + token + "'");
  }
  return value;
}

std::vector<double> RecordReader::reals(const Record& record, std::size_t first,
                                        std::size_t count) const {
  std::vector<double> values;
  values.reserve(count);
  for (std::size_t i = 0; i < count; ++i) values.push_back(real(record, first + i));
  return values;
}

void RecordReader::expect_size(const Record& record, std::size_t size) const {
  if (record.size() != size) {
    fail(record, "'" + record.kind() + "' record has " +
                     std::to_string(record.size() - 1) + " fields, expected " +
                     std::to_string(size - 1));
  }
}

}  // namespace trajaudit
