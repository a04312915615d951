#pragma once

#include <Eigen/Dense>

#include "direx/sample.hpp"

namespace direx {

// An admissible orthant direction: a unit vector in dimension >= 2 with every
// component bounded away from zero.  Zero components are rejected rather than
// perturbed because the sign pattern of u decides which way each axis of the
// oriented orthant points; a zero has no sign.
class DirectionVector {
public:
    // Strict constructor: the input must already have norm within 1e-9 of 1.
    // It is then rescaled to unit norm so the stored vector satisfies the
    // tighter 1e-12 invariant exactly.
    explicit DirectionVector(Eigen::VectorXd components);

    // Rescales an arbitrary nonzero vector to unit norm first, then applies
    // the same admissibility checks.  Handy for user-supplied directions.
    static DirectionVector normalized(Eigen::VectorXd v);

    int dim() const { return static_cast<int>(components_.size()); }
    const Eigen::VectorXd& components() const { return components_; }
    double operator[](int i) const { return components_(i); }

    bool operator==(const DirectionVector& other) const {
        return components_.size() == other.components_.size() && components_ == other.components_;
    }

private:
    Eigen::VectorXd components_;
};

// The diagonal direction e = (sqrt(n)/n) * (1, ..., 1), the reference
// direction whose oriented orthant is the standard upper orthant.
DirectionVector canonical_diagonal(int n);

// Orthogonal map taking the direction it was built from onto the canonical
// diagonal.  Only build_rotation can construct one.
class RotationMatrix {
public:
    const Eigen::MatrixXd& entries() const { return entries_; }
    const DirectionVector& source_direction() const { return source_; }
    int dim() const { return source_.dim(); }

    // True when construction recognised u as exactly the canonical diagonal
    // and returned the exact identity (no floating-point product involved).
    bool is_identity() const { return is_identity_; }

    Eigen::VectorXd apply(const Eigen::VectorXd& x) const {
        return is_identity_ ? x : Eigen::VectorXd(entries_ * x);
    }

private:
    friend RotationMatrix build_rotation(const DirectionVector& u);
    RotationMatrix(Eigen::MatrixXd entries, DirectionVector source, bool is_identity)
        : entries_(std::move(entries)), source_(std::move(source)), is_identity_(is_identity) {}

    Eigen::MatrixXd entries_;
    DirectionVector source_;
    bool is_identity_;
};

// Builds R_u = Q_e * Q_u', where Q_u and Q_e come from QR factorisations
// (with positive diagonal triangular factors) of the frames
//   M_u = [u, sgn(u_2) e_2, ..., sgn(u_n) e_n],
//   M_e = [e, e_2, ..., e_n].
// R_u is orthogonal and maps u onto the canonical diagonal e.  The
// construction is deterministic: the same u yields bitwise-identical output.
RotationMatrix build_rotation(const DirectionVector& u);

// Membership test for the closed oriented orthant with the given vertex:
// R_u * (z - vertex) >= 0 componentwise.  The vertex itself is always inside.
bool orthant_contains(const Eigen::VectorXd& vertex, const DirectionVector& u,
                      const Eigen::VectorXd& z);

// Applies R_u to every row of the sample; row order and column names are
// preserved.  Pairwise Euclidean distances are preserved up to roundoff.
Sample rotate_sample(const Sample& s, const DirectionVector& u);

}  // namespace direx
