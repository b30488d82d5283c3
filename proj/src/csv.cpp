#include "netreg/csv.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <unordered_map>

namespace netreg {

namespace {

std::vector<std::string> split_csv_line(const std::string& line, std::size_t line_no) {
  std::vector<std::string> fields;
  std::string current;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          current.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        current.push_back(c);
      }
    } else if (c == '"') {
      if (!current.empty()) {
        throw ValidationError("line " + std::to_string(line_no) +
                              ": quote inside unquoted field");
      }
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(current));
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  if (quoted) {
    throw ValidationError("line " + std::to_string(line_no) + ": unterminated quote");
  }
  fields.push_back(std::move(current));
  return fields;
}

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && (s[a] == ' ' || s[a] == '\t')) ++a;
  while (b > a && (s[b - 1] == ' ' || s[b - 1] == '\t')) --b;
  return s.substr(a, b - a);
}

double parse_cell(const std::string& raw, std::size_t line_no,
                  const std::string& column) {
  const std::string cell = trim(raw);
  if (cell.empty() || cell == "NA" || cell == "nan" || cell == "NaN") {
    throw ValidationError("missing value at line " + std::to_string(line_no) +
                          " in column '" + column + "'");
  }
  double value = 0.0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last) {
    throw ValidationError("non-numeric value '" + cell + "' at line " +
                          std::to_string(line_no) + " in column '" + column + "'");
  }
  return value;
}

std::string format_full(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

}  // namespace

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) {
    return field;
  }
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out += '"';
  return out;
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ValidationError("cannot open file: " + path);
  }
  CsvTable table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() && line_no > 1) continue;
    std::vector<std::string> fields = split_csv_line(line, line_no);
    if (line_no == 1) {
      table.header = std::move(fields);
    } else {
      if (fields.size() != table.header.size()) {
        throw ValidationError("line " + std::to_string(line_no) + ": expected " +
                              std::to_string(table.header.size()) + " fields, got " +
                              std::to_string(fields.size()));
      }
      table.rows.push_back(std::move(fields));
      table.row_lines.push_back(line_no);
    }
  }
  if (table.header.empty()) {
    throw ValidationError("empty CSV file: " + path);
  }
  return table;
}

Dataset ingest_csv(const std::string& path, const std::string& outcome_column,
                   const std::vector<std::string>& confounder_columns,
                   const std::vector<std::string>& protein_columns) {
  const CsvTable table = read_csv(path);

  std::unordered_map<std::string, Index> index;
  for (std::size_t j = 0; j < table.header.size(); ++j) {
    const std::string name = trim(table.header[j]);
    if (!index.emplace(name, static_cast<Index>(j)).second) {
      throw ValidationError("duplicate column name: " + name);
    }
  }
  const auto lookup = [&](const std::string& name) {
    const auto it = index.find(name);
    if (it == index.end()) {
      throw ValidationError("missing column: " + name);
    }
    return it->second;
  };

  const Index y_col = lookup(outcome_column);
  std::vector<Index> z_cols;
  for (const auto& name : confounder_columns) {
    z_cols.push_back(lookup(name));
  }

  std::vector<Index> x_cols;
  if (!protein_columns.empty()) {
    for (const auto& name : protein_columns) {
      x_cols.push_back(lookup(name));
    }
  } else {
    std::vector<bool> taken(table.header.size(), false);
    taken[static_cast<std::size_t>(y_col)] = true;
    for (Index j : z_cols) taken[static_cast<std::size_t>(j)] = true;
    for (std::size_t j = 0; j < table.header.size(); ++j) {
      if (!taken[j]) x_cols.push_back(static_cast<Index>(j));
    }
  }
  if (x_cols.empty()) {
    throw ValidationError("no protein columns identified");
  }

  const Index n = static_cast<Index>(table.rows.size());
  if (n < 1) {
    throw ValidationError("CSV has no data rows: " + path);
  }

  Dataset data;
  data.y.resize(n);
  data.Z.resize(n, static_cast<Index>(z_cols.size()));
  data.X.resize(n, static_cast<Index>(x_cols.size()));
  for (Index j : z_cols) data.z_names.push_back(trim(table.header[j]));
  for (Index j : x_cols) data.x_names.push_back(trim(table.header[j]));

  for (Index i = 0; i < n; ++i) {
    const std::size_t line_no = table.row_lines[static_cast<std::size_t>(i)];
    const auto& row = table.rows[static_cast<std::size_t>(i)];
    data.y(i) = parse_cell(row[y_col], line_no, trim(table.header[y_col]));
    for (std::size_t j = 0; j < z_cols.size(); ++j) {
      data.Z(i, static_cast<Index>(j)) =
          parse_cell(row[z_cols[j]], line_no, data.z_names[j]);
    }
    for (std::size_t j = 0; j < x_cols.size(); ++j) {
      data.X(i, static_cast<Index>(j)) =
          parse_cell(row[x_cols[j]], line_no, data.x_names[j]);
    }
  }
  validate_dataset(data);
  return data;
}

void write_dataset_csv(const std::string& path, const Dataset& dataset) {
  validate_dataset(dataset);
  std::ofstream out(path);
  if (!out) {
    throw ValidationError("cannot open output file: " + path);
  }
  out << "y";
  for (const auto& name : dataset.z_names) out << ',' << csv_escape(name);
  for (const auto& name : dataset.x_names) out << ',' << csv_escape(name);
  out << '\n';
  for (Index i = 0; i < dataset.n(); ++i) {
    out << format_full(dataset.y(i));
    for (Index j = 0; j < dataset.Z.cols(); ++j) {
      out << ',' << format_full(dataset.Z(i, j));
    }
    for (Index j = 0; j < dataset.X.cols(); ++j) {
      out << ',' << format_full(dataset.X(i, j));
    }
    out << '\n';
  }
}

void write_matrix_csv(const std::string& path, const Matrix& matrix,
                      const std::vector<std::string>& column_names) {
  if (static_cast<Index>(column_names.size()) != matrix.cols()) {
    throw ValidationError("column name count does not match the matrix");
  }
  std::ofstream out(path);
  if (!out) {
    throw ValidationError("cannot open output file: " + path);
  }
  for (std::size_t j = 0; j < column_names.size(); ++j) {
    if (j > 0) out << ',';
    out << csv_escape(column_names[j]);
  }
  out << '\n';
  for (Index i = 0; i < matrix.rows(); ++i) {
    for (Index j = 0; j < matrix.cols(); ++j) {
      if (j > 0) out << ',';
      out << format_full(matrix(i, j));
    }
    out << '\n';
  }
}

NamedMatrix read_matrix_csv(const std::string& path) {
  const CsvTable table = read_csv(path);
  NamedMatrix out;
  out.column_names = table.header;
  out.values.resize(static_cast<Index>(table.rows.size()),
                    static_cast<Index>(table.header.size()));
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    for (std::size_t j = 0; j < table.header.size(); ++j) {
      out.values(static_cast<Index>(i), static_cast<Index>(j)) =
          parse_cell(table.rows[i][j], i + 2, table.header[j]);
    }
  }
  return out;
}

void write_vector_csv(const std::string& path, const Vector& values,
                      const std::vector<std::string>& row_names,
                      const std::string& name_header,
                      const std::string& value_header) {
  if (static_cast<Index>(row_names.size()) != values.size()) {
    throw ValidationError("row name count does not match the vector");
  }
  std::ofstream out(path);
  if (!out) {
    throw ValidationError("cannot open output file: " + path);
  }
  out << csv_escape(name_header) << ',' << csv_escape(value_header) << '\n';
  for (Index i = 0; i < values.size(); ++i) {
    out << csv_escape(row_names[static_cast<std::size_t>(i)]) << ','
        << format_full(values(i)) << '\n';
  }
}

}  // namespace netreg
