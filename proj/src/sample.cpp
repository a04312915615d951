#include "direx/sample.hpp"

#include <utility>

#include "direx/errors.hpp"

namespace direx {

Sample::Sample(Eigen::MatrixXd rows, std::vector<std::string> column_names)
    : rows_(std::move(rows)), column_names_(std::move(column_names)) {
    if (rows_.rows() < 1) {
        throw ConfigInvalidError("sample must contain at least one row");
    }
    if (rows_.cols() < 1) {
        throw ConfigInvalidError("sample must contain at least one column");
    }
    if (static_cast<int>(column_names_.size()) != rows_.cols()) {
        throw LengthMismatchError("expected " + std::to_string(rows_.cols()) +
                                  " column names, got " + std::to_string(column_names_.size()));
    }
    if (!rows_.allFinite()) {
        for (Eigen::Index i = 0; i < rows_.rows(); ++i) {
            for (Eigen::Index j = 0; j < rows_.cols(); ++j) {
                if (!std::isfinite(rows_(i, j))) {
                    throw NonFiniteValueError("non-finite entry at row " + std::to_string(i) +
                                              ", column '" + column_names_[static_cast<size_t>(j)] + "'");
                }
            }
        }
    }
}

Sample Sample::unnamed(Eigen::MatrixXd rows) {
    std::vector<std::string> names;
    names.reserve(static_cast<size_t>(rows.cols()));
    for (Eigen::Index j = 0; j < rows.cols(); ++j) {
        names.push_back("x" + std::to_string(j + 1));
    }
    return Sample(std::move(rows), std::move(names));
}

}  // namespace direx
