#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>

#include "bisstar/knot_function.hpp"

namespace bisstar {

/// Malformed-input error carrying the offending line number for diagnostics.
class CsvError : public std::runtime_error {
 public:
  CsvError(int line, const std::string& message)
      : std::runtime_error("line " + std::to_string(line) + ": " + message), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

/// Reads a one-column numeric CSV (optional header) into a sorted sample.
SampleData ingest_csv(std::istream& in);
SampleData ingest_csv_file(const std::string& path);

}  // namespace bisstar
