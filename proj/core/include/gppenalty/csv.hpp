#pragma once

// Minimal CSV interchange: a header row of column names followed by purely
// numeric rows.  No quoting or escaping — every report this library emits is
// a rectangular table of numbers, and the reader is strict so that anything
// it accepts round-trips byte-for-byte through the writer.

#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace gppen {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;  // rectangular, header.size() wide

  int cols() const { return static_cast<int>(header.size()); }
  int n_rows() const { return static_cast<int>(rows.size()); }
};

// Shortest decimal string that parses back to exactly the same double
// ("0.25", "1e-05", "nan").  Used for every numeric field we write.
std::string format_double(double v);

// Strict parse: one header row, then rows of cols() numbers each.  Blank
// lines are ignored; a ragged row or a non-numeric field raises
// CsvFormatError naming `what` and the offending line.
CsvTable parse_csv(std::istream& in, const std::string& what);

// File wrappers.  Open/stream failures raise IoError.
CsvTable read_csv_file(const std::string& path);
void write_csv(std::ostream& out, const CsvTable& table);
void write_csv_file(const std::string& path, const CsvTable& table);

// Dataset interchange format: input columns named x1..xd, final column y,
// all in natural (unscaled) units.
CsvTable dataset_table(const Eigen::MatrixXd& inputs_natural,
                       const Eigen::VectorXd& responses_natural);

struct ParsedDataset {
  Eigen::MatrixXd inputs;      // natural units, n x d
  Eigen::VectorXd responses;   // natural units
};

// Validates the x1..xd,y header and converts the rows back to matrices.
ParsedDataset dataset_from_table(const CsvTable& table);

}  // namespace gppen
