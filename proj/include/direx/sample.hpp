#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace direx {

// A multivariate data set: m rows (observations) by n columns (variables),
// with one name per column.  Entries are validated to be finite on
// construction and the object exposes no mutators, so downstream code can
// treat a Sample as immutable.
class Sample {
public:
    Sample(Eigen::MatrixXd rows, std::vector<std::string> column_names);

    // Convenience for internal/test data: columns named x1..xn.
    static Sample unnamed(Eigen::MatrixXd rows);

    int size() const { return static_cast<int>(rows_.rows()); }
    int dim() const { return static_cast<int>(rows_.cols()); }

    const Eigen::MatrixXd& rows() const { return rows_; }
    Eigen::VectorXd row(int i) const { return rows_.row(i).transpose(); }
    double operator()(int i, int j) const { return rows_(i, j); }

    const std::vector<std::string>& column_names() const { return column_names_; }

private:
    Eigen::MatrixXd rows_;
    std::vector<std::string> column_names_;
};

}  // namespace direx
