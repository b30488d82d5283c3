#pragma once

#include <string>
#include <vector>

#include "netreg/dataset.hpp"

namespace netreg {

/// Parsed CSV: mandatory header row plus data rows (fields unescaped).
/// Comma-separated, UTF-8, '.' decimal separator; fields may be quoted with
/// '"' (doubled quotes inside). row_lines keeps each row's physical line
/// number (header is line 1, blank lines skipped but counted) so diagnostics
/// can point at the file as the user sees it.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> row_lines;
};

CsvTable read_csv(const std::string& path);

/// Quotes a field if needed for safe CSV embedding.
std::string csv_escape(const std::string& field);

/// Builds a Dataset from named columns. Empty protein list means every
/// column that is neither the outcome nor a confounder. Missing values and
/// non-numeric cells are rejected with the file line number and column name.
Dataset ingest_csv(const std::string& path, const std::string& outcome_column,
                   const std::vector<std::string>& confounder_columns,
                   const std::vector<std::string>& protein_columns = {});

/// Writes y, Z, X with %.17g so a round-trip through ingest_csv is
/// bit-identical.
void write_dataset_csv(const std::string& path, const Dataset& dataset);

void write_matrix_csv(const std::string& path, const Matrix& matrix,
                      const std::vector<std::string>& column_names);

/// Reads back a numeric matrix written by write_matrix_csv.
struct NamedMatrix {
  Matrix values;
  std::vector<std::string> column_names;
};
NamedMatrix read_matrix_csv(const std::string& path);

void write_vector_csv(const std::string& path, const Vector& values,
                      const std::vector<std::string>& row_names,
                      const std::string& name_header,
                      const std::string& value_header);

}  // namespace netreg
