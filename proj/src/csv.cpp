#include "act/csv.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "act/errors.hpp"

namespace act {

int CsvTable::column(const std::string& name) const {
  for (size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return static_cast<int>(i);
  return -1;
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const Eigen::MatrixXd& data, const std::vector<std::string>& comments) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw std::runtime_error("write_csv: cannot open '" + tmp + "'");
    for (const auto& c : comments) out << c << "\n";
    for (size_t j = 0; j < header.size(); ++j) out << (j ? "," : "") << header[j];
    out << "\n";
    char buf[64];
    for (Eigen::Index i = 0; i < data.rows(); ++i) {
      for (Eigen::Index j = 0; j < data.cols(); ++j) {
        std::snprintf(buf, sizeof buf, "%.17g", data(i, j));
        out << (j ? "," : "") << buf;
      }
      out << "\n";
    }
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw std::runtime_error("write_csv: rename to '" + path + "' failed");
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_csv: cannot open '" + path + "'");
  CsvTable table;
  std::string line;
  std::vector<std::vector<double>> rows;
  bool have_header = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::stringstream ss(line);
    std::string cell;
    if (!have_header) {
      while (std::getline(ss, cell, ',')) table.header.push_back(cell);
      have_header = true;
      continue;
    }
    std::vector<double> row;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    if (row.size() != table.header.size())
      throw ColumnMismatch("read_csv: ragged row in '" + path + "'");
    rows.push_back(std::move(row));
  }
  table.data.resize(rows.size(), table.header.size());
  for (size_t i = 0; i < rows.size(); ++i)
    for (size_t j = 0; j < rows[i].size(); ++j) table.data(i, j) = rows[i][j];
  return table;
}

namespace {

Eigen::VectorXd resample(const Eigen::VectorXd& tb, const Eigen::VectorXd& vb,
                         const Eigen::VectorXd& ta) {
  Eigen::VectorXd out(ta.size());
  for (Eigen::Index i = 0; i < ta.size(); ++i) {
    const double t = ta[i];
    if (t <= tb[0]) {
      out[i] = vb[0];
      continue;
    }
    if (t >= tb[tb.size() - 1]) {
      out[i] = vb[vb.size() - 1];
      continue;
    }
    Eigen::Index k = 0;
    while (k + 1 < tb.size() && tb[k + 1] < t) ++k;
    const double w = (t - tb[k]) / (tb[k + 1] - tb[k]);
    out[i] = (1.0 - w) * vb[k] + w * vb[k + 1];
  }
  return out;
}

}  // namespace

CompareReport compare_csv(const CsvTable& a, const CsvTable& b, CompareNorm norm,
                          const std::vector<std::string>& columns) {
  const int ta = a.column("t"), tb = b.column("t");
  if (ta < 0 || tb < 0) throw ColumnMismatch("compare_csv: both tables need a t column");

  std::vector<std::string> cols = columns;
  if (cols.empty()) {
    for (const auto& name : a.header)
      if (name != "t" && b.column(name) >= 0) cols.push_back(name);
  }
  if (cols.empty()) throw ColumnMismatch("compare_csv: no shared columns to compare");

  const Eigen::VectorXd t_a = a.data.col(ta);
  const Eigen::VectorXd t_b = b.data.col(tb);
  const bool same_grid =
      t_a.size() == t_b.size() && (t_a - t_b).cwiseAbs().maxCoeff() <= 1e-12;

  CompareReport rep;
  rep.columns = cols;
  rep.per_column.resize(cols.size());
  const double dt = t_a.size() > 1 ? t_a[1] - t_a[0] : 1.0;
  for (size_t j = 0; j < cols.size(); ++j) {
    const int ca = a.column(cols[j]);
    const int cb = b.column(cols[j]);
    if (ca < 0 || cb < 0) throw ColumnMismatch("compare_csv: missing column '" + cols[j] + "'");
    const Eigen::VectorXd va = a.data.col(ca);
    const Eigen::VectorXd vb =
        same_grid ? Eigen::VectorXd(b.data.col(cb)) : resample(t_b, b.data.col(cb), t_a);
    const Eigen::VectorXd diff = va - vb;
    if (norm == CompareNorm::Sup)
      rep.per_column[j] = diff.cwiseAbs().maxCoeff();
    else
      rep.per_column[j] = std::sqrt(diff.squaredNorm() * dt);
  }
  rep.aggregate = rep.per_column.maxCoeff();
  return rep;
}

}  // namespace act
