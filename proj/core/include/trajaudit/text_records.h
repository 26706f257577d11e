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

// Shared helpers for the line-oriented text record formats used by datasets,
// networks, policies and critics. A record is one line of whitespace
// separated tokens; the first token names the record kind. Blank lines and
// lines starting with '#' are ignored.

#ifndef TRAJAUDIT_TEXT_RECORDS_H_
#define TRAJAUDIT_TEXT_RECORDS_H_

#include <cstddef>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace trajaudit {

// 17 significant digits: enough for an exact binary64 round trip.
std::string format_real(double value);

// Shortest text that still round-trips exactly; used for human-facing output.
std::string format_shortest(double value);
void write_reals(std::ostream& out, std::span<const double> values);

struct Record {
  std::size_t line = 0;
  std::vector<std::string> tokens;

  const std::string& kind() const { return tokens.front(); }
  std::size_t size() const { return tokens.size(); }
};

class RecordReader {
 public:
  RecordReader(std::istream& in, std::string source)
      : in_(in), source_(std::move(source)) {}

  // Next non-blank, non-comment record, or nullopt at end of input.
  std::optional<Record> next();
  // Next record, which must exist and be of the given kind.
  Record expect(std::string_view kind);

  [[noreturn]] void fail(const Record& record, const std::string& what) const;
  [[noreturn]] void fail(std::size_t line, const std::string& what) const;

  double real(const Record& record, std::size_t index) const;
  std::uint64_t unsigned_integer(const Record& record, std::size_t index) const;
  // Parses tokens [first, first + count) as reals.
  std::vector<double> reals(const Record& record, std::size_t first,
                            std::size_t count) const;
  void expect_size(const Record& record, std::size_t size) const;

  const std::string& source() const { return source_; }
  std::size_t line() const { return line_; }

 private:
  std::istream& in_;
  std::string source_;
  std::size_t line_ = 0;
};

}  // namespace trajaudit

#endif  // TRAJAUDIT_TEXT_RECORDS_H_
