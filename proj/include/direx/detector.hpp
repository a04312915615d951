#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "direx/geometry.hpp"
#include "direx/sample.hpp"

namespace direx {

enum class DetectionMode {
    Survival,     // orthant mass in direction u, thresholds around alpha
    Distribution  // orthant mass in direction -u, thresholds around 1 - alpha
};

enum class PointLabel { Upper, Quantile, Lower };

const char* to_string(PointLabel label);
const char* to_string(DetectionMode mode);

struct DetectionConfig {
    double alpha;
    DirectionVector direction;
    // Half-width of the quantile band.  Unset means the finite-sample default
    // 1/(2m), resolved against the sample the detector runs on.
    std::optional<double> slack_h;
    DetectionMode mode = DetectionMode::Survival;

    double resolved_slack(int sample_size) const;
    void validate(int sample_size) const;
};

// Orthant masses kept as exact integer counts k out of m, never as floats:
// the accelerated and naive counting paths are required to agree as
// rationals, and equality of integers is checkable without tolerance.
struct OrthantCounts {
    std::vector<std::int64_t> counts;
    std::int64_t sample_size = 0;

    double probability(int i) const {
        return static_cast<double>(counts[static_cast<size_t>(i)]) /
               static_cast<double>(sample_size);
    }
};

// Fraction of the sample inside each point's oriented orthant, i.e.
// P_i = (1/m) #{ j : R_u (x_j - x_i) >= 0 componentwise }.
// Both paths first rotate the sample once and then compare rotated
// coordinates, so their comparisons are bit-identical; they differ only in
// how they organise the counting.
OrthantCounts orthant_counts(const Sample& s, const DirectionVector& u);        // spatial index
OrthantCounts orthant_counts_naive(const Sample& s, const DirectionVector& u);  // m^2 reference

// Same masses as plain per-point fractions k/m.
std::vector<double> orthant_probabilities(const Sample& s, const DirectionVector& u);

struct DetectionResult {
    OrthantCounts counts;           // masses in the counting direction of the mode
    std::vector<PointLabel> labels;
    double alpha = 0.0;
    double slack = 0.0;
    DetectionMode mode = DetectionMode::Survival;

    std::int64_t count_of(PointLabel label) const;
};

// Labels every sample point against the level-alpha directional quantile.
// Survival mode: Quantile iff |P_i - alpha| <= h, Upper iff P_i < alpha - h,
// Lower otherwise.  Distribution mode uses masses in direction -u and the
// mirrored thresholds around 1 - alpha.  Band ties resolve to Quantile.
DetectionResult detect(const Sample& s, const DetectionConfig& config);

// Empirical containment check between the two one-sided extreme regions:
// every point whose distribution-side mass exceeds 1 - alpha must have
// survival-side mass below alpha + 1/m.  Both masses come from one rotation
// of the sample (direction -u flips the sign of the rotation matrix, so its
// counts are the reversed-dominance counts of the same rotated points),
// which makes the inequality exact for samples without duplicate points.
struct ContainmentReport {
    std::vector<int> violating_indices;
    int sample_size = 0;
    double alpha = 0.0;
    std::int64_t distribution_upper_count = 0;  // points with P[-u] > 1 - alpha
    std::int64_t survival_upper_count = 0;      // points with P[u] < alpha + 1/m

    bool ok() const { return violating_indices.empty(); }
};

ContainmentReport containment_check(const Sample& s, const DirectionVector& u, double alpha);

}  // namespace direx
