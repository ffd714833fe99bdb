#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace act {

struct CsvTable {
  std::vector<std::string> header;
  Eigen::MatrixXd data;  // rows x columns

  int column(const std::string& name) const;  // -1 when absent
};

/// Writes values with 17 significant digits, comma separator, '.' decimal
/// point; the write is atomic (temp file + rename). Comment lines are
/// emitted verbatim before the header.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const Eigen::MatrixXd& data, const std::vector<std::string>& comments = {});

CsvTable read_csv(const std::string& path);

enum class CompareNorm { Sup, L2 };

struct CompareReport {
  std::vector<std::string> columns;
  Eigen::VectorXd per_column;
  double aggregate = 0.0;
};

/// Per-column norms of a - b. Requires matching t columns to 1e-12, else b
/// is re-sampled onto a's t column by linear interpolation. An empty column
/// selection compares all shared non-t columns.
CompareReport compare_csv(const CsvTable& a, const CsvTable& b, CompareNorm norm,
                          const std::vector<std::string>& columns = {});

}  // namespace act
