#include "bisstar/io.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <vector>

namespace bisstar {

namespace {

bool parse_number(const std::string& tok, double& out) {
  try {
    std::size_t pos = 0;
    out = std::stod(tok, &pos);
    while (pos < tok.size() && std::isspace(static_cast<unsigned char>(tok[pos]))) ++pos;
    return pos == tok.size();
  } catch (const std::exception&) {
    return false;
  }
}

std::string strip(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

}  // namespace

SampleData ingest_csv(std::istream& in) {
  std::vector<double> values;
  std::string line;
  int line_no = 0;
  bool first_content = true;
  while (std::getline(in, line)) {
    ++line_no;
    std::string tok = strip(line);
    if (tok.empty()) continue;
    double v = 0.0;
    if (!parse_number(tok, v)) {
      if (first_content) {  // a single non-numeric first row is a header
        first_content = false;
        continue;
      }
      throw CsvError(line_no, "expected one numeric value, got '" + tok + "'");
    }
    if (!std::isfinite(v)) throw CsvError(line_no, "non-finite value '" + tok + "'");
    first_content = false;
    values.push_back(v);
  }
  if (values.size() < 2) throw CsvError(line_no, "need at least two data rows");
  return SampleData(std::move(values));
}

SampleData ingest_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CsvError(0, "cannot open '" + path + "'");
  return ingest_csv(in);
}

}  // namespace bisstar
