#pragma once

#include <Eigen/Dense>

#include <vector>

namespace respira {

/// Samples are rows, features are columns.
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline Matrix rows_to_matrix(const std::vector<std::vector<double>>& rows) {
    if (rows.empty()) {
        return {};
    }
    Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < rows[i].size(); ++j) {
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
        }
    }
    return m;
}

} // namespace respira
