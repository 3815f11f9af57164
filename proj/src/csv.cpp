#include "csv.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include "common.hpp"

namespace gpsmc {

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

bool parse_cell(const std::string& cell, double& out) {
  const char* begin = cell.c_str();
  char* end = nullptr;
  out = std::strtod(begin, &end);
  if (end == begin) return false;
  while (*end != '\0') {
    if (!std::isspace(static_cast<unsigned char>(*end))) return false;
    ++end;
  }
  return true;
}

}  // namespace

Eigen::MatrixXd read_csv_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);

  std::vector<std::vector<double>> rows;
  std::string line;
  int line_no = 0;
  std::size_t width = 0;
  bool first_data_line = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split_line(line);

    if (first_data_line) {
      double v;
      bool all_numeric = true;
      for (const auto& c : cells)
        if (!parse_cell(c, v)) {
          all_numeric = false;
          break;
        }
      first_data_line = false;
      if (!all_numeric) continue;  // header line
    }

    std::vector<double> row(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (!parse_cell(cells[c], row[c]))
        throw ConfigError(path + ": line " + std::to_string(line_no) + ", column " +
                          std::to_string(c + 1) + ": cannot parse '" + cells[c] + "'");
      if (!std::isfinite(row[c]))
        throw ConfigError(path + ": line " + std::to_string(line_no) + ", column " +
                          std::to_string(c + 1) + ": non-finite value");
    }
    if (width == 0) {
      width = row.size();
    } else if (row.size() != width) {
      throw ConfigError(path + ": line " + std::to_string(line_no) + ": expected " +
                        std::to_string(width) + " columns, got " + std::to_string(row.size()));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ConfigError(path + ": empty dataset");

  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(width));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < width; ++c)
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
  return m;
}

Dataset ingest_csv(const std::string& path, const CsvSchema& schema) {
  const Eigen::MatrixXd table = read_csv_matrix(path);
  if (schema.input_columns.empty()) throw ConfigError("csv schema: no input columns");
  for (int c : schema.input_columns)
    if (c < 0 || c >= table.cols())
      throw ConfigError(path + ": input column " + std::to_string(c) + " out of range (" +
                        std::to_string(table.cols()) + " columns)");
  if (schema.target_column < 0 || schema.target_column >= table.cols())
    throw ConfigError(path + ": target column " + std::to_string(schema.target_column) +
                      " out of range (" + std::to_string(table.cols()) + " columns)");

  Dataset out;
  out.X.resize(table.rows(), static_cast<Eigen::Index>(schema.input_columns.size()));
  for (std::size_t k = 0; k < schema.input_columns.size(); ++k)
    out.X.col(static_cast<Eigen::Index>(k)) = table.col(schema.input_columns[k]);
  out.y = table.col(schema.target_column);
  return out;
}

std::string matrix_to_csv(const Eigen::MatrixXd& m, const std::vector<std::string>& header) {
  std::ostringstream out;
  if (!header.empty()) {
    if (static_cast<Eigen::Index>(header.size()) != m.cols())
      throw ConfigError("csv header width does not match the matrix");
    for (std::size_t c = 0; c < header.size(); ++c) {
      if (c) out << ",";
      out << header[c];
    }
    out << "\n";
  }
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c) out << ",";
      out << format_double(m(r, c));
    }
    out << "\n";
  }
  return out.str();
}

}  // namespace gpsmc
