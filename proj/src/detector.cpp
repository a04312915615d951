#include "direx/detector.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "direx/errors.hpp"

namespace direx {

namespace {

// Counts, for every row of `pts`, how many rows dominate it componentwise
// (closed inequality).  `reversed` flips the comparison to "is dominated by",
// which is how masses in direction -u are obtained: flipping the direction
// negates the rotation matrix, so the orthant condition on the same rotated
// coordinates simply reverses.
//
// The k-d tree below answers box queries with plain double comparisons on
// the same coordinates the reference double loop uses, so both paths count
// exactly the same set of pairs, ties included.
class DominanceIndex {
public:
    explicit DominanceIndex(const Eigen::MatrixXd& pts) : pts_(pts) {
        const int m = static_cast<int>(pts.rows());
        order_.resize(static_cast<size_t>(m));
        std::iota(order_.begin(), order_.end(), 0);
        nodes_.reserve(static_cast<size_t>(2 * m / kLeafSize + 2));
        root_ = build(0, m, 0);
    }

    std::int64_t count_dominators(const Eigen::RowVectorXd& q, bool reversed) const {
        return count(root_, q, reversed);
    }

private:
    static constexpr int kLeafSize = 16;

    struct Node {
        Eigen::RowVectorXd lo, hi;  // bounding box over the subtree's points
        int begin = 0, end = 0;     // range in order_ (leaves only)
        int left = -1, right = -1;
    };

    int build(int begin, int end, int depth) {
        Node node;
        node.begin = begin;
        node.end = end;
        node.lo = pts_.row(order_[static_cast<size_t>(begin)]);
        node.hi = node.lo;
        for (int i = begin + 1; i < end; ++i) {
            const auto& row = pts_.row(order_[static_cast<size_t>(i)]);
            node.lo = node.lo.cwiseMin(row);
            node.hi = node.hi.cwiseMax(row);
        }
        const int idx = static_cast<int>(nodes_.size());
        nodes_.push_back(node);
        if (end - begin > kLeafSize) {
            const int axis = depth % static_cast<int>(pts_.cols());
            const int mid = begin + (end - begin) / 2;
            std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                             [&](int a, int b) { return pts_(a, axis) < pts_(b, axis); });
            const int left = build(begin, mid, depth + 1);
            const int right = build(mid, end, depth + 1);
            nodes_[static_cast<size_t>(idx)].left = left;
            nodes_[static_cast<size_t>(idx)].right = right;
        }
        return idx;
    }

    std::int64_t count(int idx, const Eigen::RowVectorXd& q, bool reversed) const {
        const Node& node = nodes_[static_cast<size_t>(idx)];
        if (!reversed) {
            // Query region is the closed upper box [q, +inf)^n.
            if ((node.lo.array() >= q.array()).all()) {
                return node.end - node.begin;
            }
            if ((node.hi.array() < q.array()).any()) {
                return 0;
            }
        } else {
            if ((node.hi.array() <= q.array()).all()) {
                return node.end - node.begin;
            }
            if ((node.lo.array() > q.array()).any()) {
                return 0;
            }
        }
        if (node.left < 0) {
            std::int64_t c = 0;
            for (int i = node.begin; i < node.end; ++i) {
                const auto& row = pts_.row(order_[static_cast<size_t>(i)]);
                if (!reversed ? (row.array() >= q.array()).all()
                              : (row.array() <= q.array()).all()) {
                    ++c;
                }
            }
            return c;
        }
        return count(node.left, q, reversed) + count(node.right, q, reversed);
    }

    const Eigen::MatrixXd& pts_;
    std::vector<int> order_;
    std::vector<Node> nodes_;
    int root_ = -1;
};

OrthantCounts count_with_index(const Eigen::MatrixXd& rotated, bool reversed) {
    const int m = static_cast<int>(rotated.rows());
    DominanceIndex index(rotated);
    OrthantCounts out;
    out.sample_size = m;
    out.counts.resize(static_cast<size_t>(m));
    for (int i = 0; i < m; ++i) {
        out.counts[static_cast<size_t>(i)] = index.count_dominators(rotated.row(i), reversed);
    }
    return out;
}

OrthantCounts count_naive(const Eigen::MatrixXd& rotated, bool reversed) {
    const int m = static_cast<int>(rotated.rows());
    OrthantCounts out;
    out.sample_size = m;
    out.counts.assign(static_cast<size_t>(m), 0);
    for (int i = 0; i < m; ++i) {
        std::int64_t c = 0;
        for (int j = 0; j < m; ++j) {
            const bool inside = !reversed
                                    ? (rotated.row(j).array() >= rotated.row(i).array()).all()
                                    : (rotated.row(j).array() <= rotated.row(i).array()).all();
            if (inside) {
                ++c;
            }
        }
        out.counts[static_cast<size_t>(i)] = c;
    }
    return out;
}

}  // namespace

const char* to_string(PointLabel label) {
    switch (label) {
        case PointLabel::Upper: return "upper";
        case PointLabel::Quantile: return "quantile";
        case PointLabel::Lower: return "lower";
    }
    return "?";
}

const char* to_string(DetectionMode mode) {
    return mode == DetectionMode::Survival ? "survival" : "distribution";
}

double DetectionConfig::resolved_slack(int sample_size) const {
    return slack_h ? *slack_h : 0.5 / static_cast<double>(sample_size);
}

void DetectionConfig::validate(int sample_size) const {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw ConfigInvalidError("alpha must lie in (0, 1)");
    }
    const double h = resolved_slack(sample_size);
    if (!(h >= 0.0) || !std::isfinite(h)) {
        throw ConfigInvalidError("slack must be finite and non-negative");
    }
    if (mode == DetectionMode::Survival && !(alpha - h > 0.0)) {
        throw ConfigInvalidError("survival mode needs alpha - slack > 0");
    }
    if (!(alpha + h < 1.0)) {
        throw ConfigInvalidError("alpha + slack must stay below 1");
    }
}

OrthantCounts orthant_counts(const Sample& s, const DirectionVector& u) {
    return count_with_index(rotate_sample(s, u).rows(), false);
}

OrthantCounts orthant_counts_naive(const Sample& s, const DirectionVector& u) {
    return count_naive(rotate_sample(s, u).rows(), false);
}

std::vector<double> orthant_probabilities(const Sample& s, const DirectionVector& u) {
    const OrthantCounts c = orthant_counts(s, u);
    std::vector<double> out(c.counts.size());
    for (size_t i = 0; i < c.counts.size(); ++i) {
        out[i] = c.probability(static_cast<int>(i));
    }
    return out;
}

std::int64_t DetectionResult::count_of(PointLabel label) const {
    return std::count(labels.begin(), labels.end(), label);
}

DetectionResult detect(const Sample& s, const DetectionConfig& config) {
    if (s.dim() != config.direction.dim()) {
        throw DimensionMismatchError("sample dimension does not match detection direction");
    }
    config.validate(s.size());

    const bool reversed = config.mode == DetectionMode::Distribution;
    const Sample rotated = rotate_sample(s, config.direction);
    DetectionResult result;
    result.counts = count_with_index(rotated.rows(), reversed);
    result.alpha = config.alpha;
    result.slack = config.resolved_slack(s.size());
    result.mode = config.mode;
    // In Distribution mode the quantile sits at mass 1 - alpha and the upper
    // extreme region is where the distribution-side mass exceeds it.
    const double center = reversed ? 1.0 - config.alpha : config.alpha;
    result.labels.resize(static_cast<size_t>(s.size()));
    for (int i = 0; i < s.size(); ++i) {
        const double p = result.counts.probability(i);
        PointLabel label;
        if (std::abs(p - center) <= result.slack) {
            label = PointLabel::Quantile;
        } else if (!reversed ? p < center : p > center) {
            label = PointLabel::Upper;
        } else {
            label = PointLabel::Lower;
        }
        result.labels[static_cast<size_t>(i)] = label;
    }
    return result;
}

ContainmentReport containment_check(const Sample& s, const DirectionVector& u, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw ConfigInvalidError("alpha must lie in (0, 1)");
    }
    if (s.dim() != u.dim()) {
        throw DimensionMismatchError("sample dimension does not match direction");
    }
    const Eigen::MatrixXd rotated = rotate_sample(s, u).rows();
    const OrthantCounts forward = count_with_index(rotated, false);
    const OrthantCounts backward = count_with_index(rotated, true);

    ContainmentReport report;
    report.sample_size = static_cast<int>(rotated.rows());
    report.alpha = alpha;
    const double slack_bound = alpha + 1.0 / static_cast<double>(report.sample_size);
    for (int i = 0; i < report.sample_size; ++i) {
        const bool distribution_upper = backward.probability(i) > 1.0 - alpha;
        const bool survival_upper = forward.probability(i) < slack_bound;
        report.distribution_upper_count += distribution_upper ? 1 : 0;
        report.survival_upper_count += survival_upper ? 1 : 0;
        if (distribution_upper && !survival_upper) {
            report.violating_indices.push_back(i);
        }
    }
    return report;
}

}  // namespace direx
