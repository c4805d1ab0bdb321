#pragma once

#include <Eigen/Dense>

#include <optional>
#include <string>

#include "lslasso/losses.hpp"

namespace lslasso {

/// Fixed N x p design X with X(i, j) = h_j(Z_i). Entries are finite.
class DesignMatrix {
 public:
  explicit DesignMatrix(Eigen::MatrixXd values);

  Eigen::Index rows() const { return values_.rows(); }
  Eigen::Index cols() const { return values_.cols(); }
  const Eigen::MatrixXd& values() const { return values_; }
  auto column(Eigen::Index j) const { return values_.col(j); }
  auto row(Eigen::Index i) const { return values_.row(i); }

 private:
  Eigen::MatrixXd values_;
};

/// Axis-aligned compact box D0 = prod_j [lower_j, upper_j].
class ParamDomain {
 public:
  ParamDomain(Eigen::VectorXd lower, Eigen::VectorXd upper);
  static ParamDomain uniform_box(Eigen::Index p, double lo, double hi);

  Eigen::Index dim() const { return lower_.size(); }
  const Eigen::VectorXd& lower() const { return lower_; }
  const Eigen::VectorXd& upper() const { return upper_; }

  bool contains(const Eigen::VectorXd& v) const;
  Eigen::VectorXd project(const Eigen::VectorXd& v) const;

 private:
  Eigen::VectorXd lower_;
  Eigen::VectorXd upper_;
};

/// d_j = max_i |X(i, j)|. Throws on an all-zero column.
Eigen::VectorXd column_scales(const DesignMatrix& x);

/// Margin kept from the open ends of the loss interval.
inline constexpr double kFeasibilityMargin = 1e-9;

struct Feasibility {
  bool ok = true;
  std::optional<Eigen::Index> row;  // first offending row
  double index_min = 0.0;           // min over rows and box of x_i'v
  double index_max = 0.0;
  std::string diagnostic;
};

/// Checks that x_i'v stays strictly inside (a, b) for every row and every v
/// in the box. Extremes of a linear functional over a box are found by
/// splitting on the sign of each entry.
Feasibility check_feasibility(const DesignMatrix& x, const ParamDomain& dom, Interval interval);

/// [min, max] of x_i'v over all rows and all v in the box.
Interval index_range(const DesignMatrix& x, const ParamDomain& dom);

struct Diameters {
  double weighted = 0.0;    // R = sum_j d_j (upper_j - lower_j)
  double unweighted = 0.0;  // Delta = sum_j (upper_j - lower_j)
};

Diameters weighted_l1_diameter(const ParamDomain& dom, const Eigen::VectorXd& d);

// CSV input. Cells are separated by commas; blank lines are skipped.
DesignMatrix read_design_csv(const std::string& path, bool header);
/// Reads a response vector. With a header, `column` selects the column by
/// name (empty selects the first); without one, the first column is used.
Eigen::VectorXd read_response_csv(const std::string& path, bool header,
                                  const std::string& column = {});

void write_matrix_csv(const std::string& path, const Eigen::MatrixXd& m,
                      const std::string& header_prefix);
void write_vector_csv(const std::string& path, const Eigen::VectorXd& v,
                      const std::string& header);

}  // namespace lslasso
