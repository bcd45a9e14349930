#include "gppenalty/csv.hpp"

#include <cerrno>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "gppenalty/errors.hpp"

namespace gppen {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

double parse_field(const std::string& field, const std::string& what,
                   int line_no) {
  const char* begin = field.c_str();
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(begin, &end);
  // Accept only if strtod consumed the whole field (strtod itself skips any
  // leading whitespace; trailing whitespace is not tolerated).
  if (end == begin || *end != '\0') {
    throw CsvFormatError(what + ": line " + std::to_string(line_no) +
                         ": field \"" + field + "\" is not a number");
  }
  return v;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

CsvTable parse_csv(std::istream& in, const std::string& what) {
  CsvTable table;
  std::string line;
  int line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> fields = split_fields(line);
    if (!have_header) {
      table.header = fields;
      have_header = true;
      continue;
    }
    if (static_cast<int>(fields.size()) != table.cols()) {
      throw CsvFormatError(what + ": line " + std::to_string(line_no) +
                           ": expected " + std::to_string(table.cols()) +
                           " fields, got " + std::to_string(fields.size()));
    }
    std::vector<double> row(fields.size());
    for (std::size_t i = 0; i < fields.size(); ++i) {
      row[i] = parse_field(fields[i], what, line_no);
    }
    table.rows.push_back(std::move(row));
  }
  if (!have_header) {
    throw CsvFormatError(what + ": empty input, expected a header row");
  }
  return table;
}

CsvTable read_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open \"" + path + "\" for reading");
  }
  return parse_csv(in, path);
}

void write_csv(std::ostream& out, const CsvTable& table) {
  for (int i = 0; i < table.cols(); ++i) {
    if (i > 0) out << ',';
    out << table.header[i];
  }
  out << '\n';
  for (const std::vector<double>& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i > 0) out << ',';
      out << format_double(row[i]);
    }
    out << '\n';
  }
}

void write_csv_file(const std::string& path, const CsvTable& table) {
  std::ofstream out(path);
  if (!out) {
    throw IoError("cannot open \"" + path + "\" for writing");
  }
  write_csv(out, table);
  out.flush();
  if (!out) {
    throw IoError("write to \"" + path + "\" failed");
  }
}

CsvTable dataset_table(const Eigen::MatrixXd& inputs_natural,
                       const Eigen::VectorXd& responses_natural) {
  if (inputs_natural.rows() != responses_natural.size()) {
    throw ShapeError("dataset_table: " + std::to_string(inputs_natural.rows()) +
                     " input rows vs " + std::to_string(responses_natural.size()) +
                     " responses");
  }
  CsvTable table;
  for (int p = 0; p < inputs_natural.cols(); ++p) {
    table.header.push_back("x" + std::to_string(p + 1));
  }
  table.header.push_back("y");
  for (int i = 0; i < inputs_natural.rows(); ++i) {
    std::vector<double> row(inputs_natural.cols() + 1);
    for (int p = 0; p < inputs_natural.cols(); ++p) {
      row[p] = inputs_natural(i, p);
    }
    row.back() = responses_natural[i];
    table.rows.push_back(std::move(row));
  }
  return table;
}

ParsedDataset dataset_from_table(const CsvTable& table) {
  const int cols = table.cols();
  if (cols < 2) {
    throw CsvFormatError("dataset CSV needs at least one input column and a "
                         "final y column");
  }
  for (int p = 0; p + 1 < cols; ++p) {
    const std::string expected = "x" + std::to_string(p + 1);
    if (table.header[p] != expected) {
      throw CsvFormatError("dataset CSV: column " + std::to_string(p + 1) +
                           " is named \"" + table.header[p] +
                           "\", expected \"" + expected + "\"");
    }
  }
  if (table.header.back() != "y") {
    throw CsvFormatError("dataset CSV: final column is named \"" +
                         table.header.back() + "\", expected \"y\"");
  }
  ParsedDataset out;
  const int n = table.n_rows();
  const int d = cols - 1;
  out.inputs.resize(n, d);
  out.responses.resize(n);
  for (int i = 0; i < n; ++i) {
    for (int p = 0; p < d; ++p) out.inputs(i, p) = table.rows[i][p];
    out.responses[i] = table.rows[i][d];
  }
  return out;
}

}  // namespace gppen
