#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "model.hpp"

namespace gpsmc {

// Column selection for regression datasets. Indices are 0-based positions in
// the CSV row.
struct CsvSchema {
  std::vector<int> input_columns;
  int target_column = -1;
};

// Numeric CSV table. A first line whose cells are not all numeric is treated
// as a header and skipped. Ragged rows, unparsable cells and non-finite
// values are errors naming the line (1-based) and column.
Eigen::MatrixXd read_csv_matrix(const std::string& path);

// Dataset extraction per schema; row order preserved.
Dataset ingest_csv(const std::string& path, const CsvSchema& schema);

// Writes a matrix with an optional header line (joined with commas when
// non-empty). Values use the shortest round-trip decimal form.
std::string matrix_to_csv(const Eigen::MatrixXd& m, const std::vector<std::string>& header);

}  // namespace gpsmc
