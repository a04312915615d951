#pragma once

#include <string>
#include <vector>

#include "direx/geometry.hpp"
#include "direx/sample.hpp"

namespace direx {

// The 2^n classical diagonal directions: every component is +-1/sqrt(n).
// Names are the sign patterns, e.g. "++-", with the all-plus entry first
// (that one is the canonical diagonal e and "---...-" is -e).
struct DirectionCatalog {
    struct Entry {
        std::string name;
        DirectionVector direction;
    };

    std::vector<Entry> entries;

    const DirectionVector* find(const std::string& name) const;
};

DirectionCatalog classical_directions(int n);

// Direction of largest variance: the leading eigenvector of the sample
// covariance matrix (or the correlation matrix when use_correlation is set),
// sign-fixed so its dot product with the canonical diagonal is positive.
// Raises if the leading eigenvalue is tied within relative tolerance 1e-9
// (no single dominant axis) or if the eigenvector has a zero component
// (inadmissible as an orthant direction).
DirectionVector first_pca_direction(const Sample& s, bool use_correlation = false);

}  // namespace direx
