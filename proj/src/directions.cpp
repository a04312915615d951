#include "direx/directions.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <string>

#include "direx/errors.hpp"

namespace direx {

namespace {

constexpr int kMaxCatalogDim = 16;
constexpr double kEigTieTol = 1e-9;  // relative gap below which the top eigenvalue is "tied"

}  // namespace

const DirectionVector* DirectionCatalog::find(const std::string& name) const {
    for (const auto& entry : entries) {
        if (entry.name == name) {
            return &entry.direction;
        }
    }
    return nullptr;
}

DirectionCatalog classical_directions(int n) {
    if (n < 2) {
        throw DimensionMismatchError("classical directions need dimension >= 2");
    }
    if (n > kMaxCatalogDim) {
        throw DimensionTooLargeError("classical catalog capped at dimension 16, got " +
                                     std::to_string(n));
    }
    const double mag = std::sqrt(static_cast<double>(n)) / n;
    DirectionCatalog catalog;
    catalog.entries.reserve(static_cast<size_t>(1) << n);
    // Mask bit i set means component i is negative; mask 0 is e itself.
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
        std::string name(static_cast<size_t>(n), '+');
        Eigen::VectorXd v(n);
        for (int i = 0; i < n; ++i) {
            const bool neg = (mask >> i) & 1u;
            v(i) = neg ? -mag : mag;
            if (neg) {
                name[static_cast<size_t>(i)] = '-';
            }
        }
        catalog.entries.push_back({std::move(name), DirectionVector(std::move(v))});
    }
    return catalog;
}

DirectionVector first_pca_direction(const Sample& s, bool use_correlation) {
    if (s.size() < 2) {
        throw ConfigInvalidError("PCA direction needs at least two observations");
    }
    const Eigen::MatrixXd centered = s.rows().rowwise() - s.rows().colwise().mean();
    Eigen::MatrixXd cov =
        (centered.transpose() * centered) / static_cast<double>(s.size() - 1);

    if (use_correlation) {
        Eigen::VectorXd sd = cov.diagonal().cwiseSqrt();
        for (int j = 0; j < s.dim(); ++j) {
            if (!(sd(j) > 0.0)) {
                throw DegenerateCovarianceError("variable " + std::to_string(j) +
                                                " has zero variance; correlation undefined");
            }
        }
        cov = (sd.asDiagonal().inverse() * cov * sd.asDiagonal().inverse()).eval();
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
    if (solver.info() != Eigen::Success) {
        throw DegenerateCovarianceError("eigendecomposition of the covariance failed");
    }
    // Eigen returns eigenvalues in increasing order; the leading pair sits at
    // the end.
    const int n = s.dim();
    const double lead = solver.eigenvalues()(n - 1);
    const double runner_up = solver.eigenvalues()(n - 2);
    if (!(lead > 0.0)) {
        throw DegenerateCovarianceError("covariance has no positive leading eigenvalue");
    }
    if (lead - runner_up <= kEigTieTol * lead) {
        throw DegenerateCovarianceError(
            "leading eigenvalue is tied within relative tolerance 1e-9; "
            "no single direction of largest variance");
    }

    Eigen::VectorXd v = solver.eigenvectors().col(n - 1);
    const double toward_diagonal = v.sum();  // sign of v'e, up to the positive factor sqrt(n)/n
    if (toward_diagonal < 0.0) {
        v = -v;
    } else if (toward_diagonal == 0.0) {
        throw AdmissibilityError(
            "leading eigenvector is orthogonal to the diagonal; sign convention undefined");
    }
    for (int i = 0; i < n; ++i) {
        if (std::abs(v(i)) < 1e-12) {
            throw AdmissibilityError("leading eigenvector has a zero component " +
                                     std::to_string(i) + "; not an admissible direction");
        }
    }
    return DirectionVector(std::move(v));
}

}  // namespace direx
