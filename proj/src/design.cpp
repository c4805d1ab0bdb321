#include "lslasso/design.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace lslasso {

namespace {

std::vector<std::string> split_cells(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    const auto b = cell.find_first_not_of(" \t\r");
    const auto e = cell.find_last_not_of(" \t\r");
    cells.push_back(b == std::string::npos ? std::string{} : cell.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

double parse_cell(const std::string& cell, const std::string& path, std::size_t line_no) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(cell, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != cell.size()) {
    throw std::runtime_error(path + ":" + std::to_string(line_no) + ": not a number: '" + cell +
                             "'");
  }
  return v;
}

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

CsvTable read_table(const std::string& path, bool header) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  CsvTable table;
  std::string line;
  std::size_t line_no = 0;
  bool header_pending = header;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto cells = split_cells(line);
    if (header_pending) {
      table.header = std::move(cells);
      header_pending = false;
      continue;
    }
    std::vector<double> row;
    row.reserve(cells.size());
    for (const auto& c : cells) row.push_back(parse_cell(c, path, line_no));
    if (!table.rows.empty() && row.size() != table.rows.front().size()) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": ragged row");
    }
    table.rows.push_back(std::move(row));
  }
  if (table.rows.empty()) throw std::runtime_error(path + ": no data rows");
  return table;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

DesignMatrix::DesignMatrix(Eigen::MatrixXd values) : values_(std::move(values)) {
  if (values_.rows() < 1 || values_.cols() < 1) {
    throw std::invalid_argument("design matrix needs N >= 1 and p >= 1");
  }
  if (!values_.allFinite()) throw std::invalid_argument("design matrix has non-finite entries");
}

ParamDomain::ParamDomain(Eigen::VectorXd lower, Eigen::VectorXd upper)
    : lower_(std::move(lower)), upper_(std::move(upper)) {
  if (lower_.size() != upper_.size() || lower_.size() < 1) {
    throw std::invalid_argument("domain bounds must have equal, positive length");
  }
  for (Eigen::Index j = 0; j < lower_.size(); ++j) {
    if (!std::isfinite(lower_[j]) || !std::isfinite(upper_[j]) || !(lower_[j] < upper_[j])) {
      throw std::invalid_argument("domain requires finite lower_j < upper_j (j = " +
                                  std::to_string(j) + ")");
    }
  }
}

ParamDomain ParamDomain::uniform_box(Eigen::Index p, double lo, double hi) {
  return ParamDomain(Eigen::VectorXd::Constant(p, lo), Eigen::VectorXd::Constant(p, hi));
}

bool ParamDomain::contains(const Eigen::VectorXd& v) const {
  if (v.size() != dim()) return false;
  return (v.array() >= lower_.array()).all() && (v.array() <= upper_.array()).all();
}

Eigen::VectorXd ParamDomain::project(const Eigen::VectorXd& v) const {
  return v.cwiseMax(lower_).cwiseMin(upper_);
}

Eigen::VectorXd column_scales(const DesignMatrix& x) {
  Eigen::VectorXd d = x.values().cwiseAbs().colwise().maxCoeff().transpose();
  for (Eigen::Index j = 0; j < d.size(); ++j) {
    if (d[j] == 0.0) {
      throw std::invalid_argument("column " + std::to_string(j) + " is all zero; scale undefined");
    }
  }
  return d;
}

Feasibility check_feasibility(const DesignMatrix& x, const ParamDomain& dom, Interval interval) {
  if (dom.dim() != x.cols()) throw std::invalid_argument("domain dimension != design columns");
  const Eigen::MatrixXd& m = x.values();
  const Eigen::ArrayXXd hi_terms =
      (m.array().rowwise() * dom.upper().transpose().array())
          .max(m.array().rowwise() * dom.lower().transpose().array());
  const Eigen::ArrayXXd lo_terms =
      (m.array().rowwise() * dom.upper().transpose().array())
          .min(m.array().rowwise() * dom.lower().transpose().array());
  const Eigen::VectorXd row_max = hi_terms.rowwise().sum().matrix();
  const Eigen::VectorXd row_min = lo_terms.rowwise().sum().matrix();

  Feasibility out;
  out.index_min = row_min.minCoeff();
  out.index_max = row_max.maxCoeff();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    if (row_min[i] <= interval.lo + kFeasibilityMargin ||
        row_max[i] >= interval.hi - kFeasibilityMargin) {
      out.ok = false;
      out.row = i;
      std::ostringstream msg;
      msg << "row " << i << " reaches [" << row_min[i] << ", " << row_max[i]
          << "] outside the open interval (" << interval.lo << ", " << interval.hi << ")";
      out.diagnostic = msg.str();
      break;
    }
  }
  return out;
}

Interval index_range(const DesignMatrix& x, const ParamDomain& dom) {
  const auto f = check_feasibility(
      x, dom, {-std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()});
  return {f.index_min, f.index_max};
}

Diameters weighted_l1_diameter(const ParamDomain& dom, const Eigen::VectorXd& d) {
  if (d.size() != dom.dim()) throw std::invalid_argument("scale vector length != domain dim");
  const Eigen::VectorXd width = dom.upper() - dom.lower();
  return {d.dot(width), width.sum()};
}

DesignMatrix read_design_csv(const std::string& path, bool header) {
  const CsvTable t = read_table(path, header);
  Eigen::MatrixXd m(static_cast<Eigen::Index>(t.rows.size()),
                    static_cast<Eigen::Index>(t.rows.front().size()));
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    for (std::size_t j = 0; j < t.rows[i].size(); ++j) m(i, j) = t.rows[i][j];
  }
  return DesignMatrix(std::move(m));
}

Eigen::VectorXd read_response_csv(const std::string& path, bool header,
                                  const std::string& column) {
  const CsvTable t = read_table(path, header);
  std::size_t col = 0;
  if (!column.empty()) {
    if (!header) throw std::invalid_argument("response column by name requires a header row");
    bool found = false;
    for (std::size_t k = 0; k < t.header.size(); ++k) {
      if (t.header[k] == column) {
        col = k;
        found = true;
        break;
      }
    }
    if (!found) throw std::runtime_error(path + ": no column named '" + column + "'");
  }
  if (col >= t.rows.front().size()) throw std::runtime_error(path + ": column out of range");
  Eigen::VectorXd y(static_cast<Eigen::Index>(t.rows.size()));
  for (std::size_t i = 0; i < t.rows.size(); ++i) y[i] = t.rows[i][col];
  return y;
}

void write_matrix_csv(const std::string& path, const Eigen::MatrixXd& m,
                      const std::string& header_prefix) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    out << (j ? "," : "") << header_prefix << j + 1;
  }
  out << '\n';
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) out << (j ? "," : "") << format_double(m(i, j));
    out << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

void write_vector_csv(const std::string& path, const Eigen::VectorXd& v,
                      const std::string& header) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << header << '\n';
  for (Eigen::Index i = 0; i < v.size(); ++i) out << format_double(v[i]) << '\n';
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace lslasso
