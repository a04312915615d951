#include "direx/geometry.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "direx/errors.hpp"

namespace direx {

namespace {

constexpr double kNormSlack = 1e-9;      // accepted deviation of |u| from 1
constexpr double kZeroComponent = 1e-12; // components at or below this are "zero"

void check_admissible(const Eigen::VectorXd& u) {
    if (u.size() < 2) {
        throw DimensionMismatchError("direction needs dimension >= 2, got " +
                                     std::to_string(u.size()));
    }
    for (Eigen::Index i = 0; i < u.size(); ++i) {
        if (!std::isfinite(u(i))) {
            throw NonFiniteValueError("direction component " + std::to_string(i) +
                                      " is not finite");
        }
        if (std::abs(u(i)) < kZeroComponent) {
            throw ZeroComponentError("direction component " + std::to_string(i) +
                                     " is zero within 1e-12; orthant orientation undefined");
        }
    }
}

// QR with the sign convention that the triangular factor has a positive
// diagonal.  Householder QR fixes Q only up to per-column signs; flipping the
// columns whose diagonal entry came out negative makes the factorisation
// unique, which in turn makes build_rotation deterministic.
Eigen::MatrixXd positive_diagonal_q(const Eigen::MatrixXd& m) {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(m);
    Eigen::MatrixXd q = qr.householderQ();
    const Eigen::MatrixXd& packed = qr.matrixQR();
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
        if (packed(j, j) < 0.0) {
            q.col(j) = -q.col(j);
        }
    }
    return q;
}

}  // namespace

DirectionVector::DirectionVector(Eigen::VectorXd components) : components_(std::move(components)) {
    check_admissible(components_);
    const double norm = components_.norm();
    if (std::abs(norm - 1.0) > kNormSlack) {
        throw NotUnitError("direction norm " + std::to_string(norm) +
                           " deviates from 1 by more than 1e-9");
    }
    components_ /= norm;
}

DirectionVector DirectionVector::normalized(Eigen::VectorXd v) {
    const double norm = v.norm();
    if (!(norm > 0.0) || !std::isfinite(norm)) {
        throw NotUnitError("cannot normalise a zero or non-finite vector");
    }
    v /= norm;
    return DirectionVector(std::move(v));
}

DirectionVector canonical_diagonal(int n) {
    if (n < 2) {
        throw DimensionMismatchError("canonical diagonal needs dimension >= 2");
    }
    Eigen::VectorXd e = Eigen::VectorXd::Constant(n, std::sqrt(static_cast<double>(n)) / n);
    return DirectionVector(std::move(e));
}

RotationMatrix build_rotation(const DirectionVector& u) {
    const int n = u.dim();
    const DirectionVector e = canonical_diagonal(n);

    // u = e maps to the exact identity (and u = -e to its exact negation):
    // the algebra gives R_e = I exactly, and returning the literal identity
    // keeps downstream label computations free of last-ulp rotation noise.
    if (u.components() == e.components()) {
        return RotationMatrix(Eigen::MatrixXd::Identity(n, n), u, true);
    }
    if (u.components() == Eigen::VectorXd(-e.components())) {
        return RotationMatrix(-Eigen::MatrixXd::Identity(n, n), u, false);
    }

    Eigen::MatrixXd m_u = Eigen::MatrixXd::Zero(n, n);
    Eigen::MatrixXd m_e = Eigen::MatrixXd::Zero(n, n);
    m_u.col(0) = u.components();
    m_e.col(0) = e.components();
    for (int j = 1; j < n; ++j) {
        m_u(j, j) = u[j] > 0.0 ? 1.0 : -1.0;
        m_e(j, j) = 1.0;
    }

    Eigen::MatrixXd q_u = positive_diagonal_q(m_u);
    Eigen::MatrixXd q_e = positive_diagonal_q(m_e);
    Eigen::MatrixXd r = q_e * q_u.transpose();
    return RotationMatrix(std::move(r), u, false);
}

bool orthant_contains(const Eigen::VectorXd& vertex, const DirectionVector& u,
                      const Eigen::VectorXd& z) {
    if (vertex.size() != u.dim() || z.size() != u.dim()) {
        throw DimensionMismatchError("vertex/point dimension does not match direction");
    }
    const RotationMatrix r = build_rotation(u);
    const Eigen::VectorXd w = r.apply(z - vertex);
    return (w.array() >= 0.0).all();
}

Sample rotate_sample(const Sample& s, const DirectionVector& u) {
    if (s.dim() != u.dim()) {
        throw DimensionMismatchError("sample dimension " + std::to_string(s.dim()) +
                                     " does not match direction dimension " +
                                     std::to_string(u.dim()));
    }
    const RotationMatrix r = build_rotation(u);
    if (r.is_identity()) {
        return s;
    }
    // Row-by-row products: x -> R x.  (Equivalent to rows * R', but written
    // per row so it is the exact same arithmetic the membership test uses.)
    Eigen::MatrixXd out(s.size(), s.dim());
    for (int i = 0; i < s.size(); ++i) {
        out.row(i) = (r.entries() * s.row(i)).transpose();
    }
    return Sample(std::move(out), s.column_names());
}

}  // namespace direx
