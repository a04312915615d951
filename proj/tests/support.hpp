#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <utility>
#include <vector>

#include "direx/copulas.hpp"
#include "direx/geometry.hpp"
#include "direx/rng.hpp"
#include "direx/sample.hpp"

namespace testsup {

// Merge-sort inversion count; ties in the data would need a richer estimator,
// but every caller feeds continuous draws where ties have probability zero.
inline long long merge_count(std::vector<double>& a, int lo, int hi, std::vector<double>& tmp) {
    if (hi - lo <= 1) return 0;
    int mid = (lo + hi) / 2;
    long long c = merge_count(a, lo, mid, tmp) + merge_count(a, mid, hi, tmp);
    int i = lo, j = mid, k = lo;
    while (i < mid && j < hi) {
        if (a[i] <= a[j]) {
            tmp[k++] = a[i++];
        } else {
            c += mid - i;
            tmp[k++] = a[j++];
        }
    }
    while (i < mid) tmp[k++] = a[i++];
    while (j < hi) tmp[k++] = a[j++];
    std::copy(tmp.begin() + lo, tmp.begin() + hi, a.begin() + lo);
    return c;
}

// Kendall rank correlation in O(n log n): sort by the first coordinate, then
// discordant pairs are exactly the inversions of the second coordinate.
inline double kendall_tau(const std::vector<std::array<double, 2>>& pts) {
    std::vector<int> idx(pts.size());
    for (size_t i = 0; i < pts.size(); ++i) idx[i] = static_cast<int>(i);
    std::sort(idx.begin(), idx.end(),
              [&](int a, int b) { return pts[static_cast<size_t>(a)][0] < pts[static_cast<size_t>(b)][0]; });
    std::vector<double> second(pts.size()), tmp(pts.size());
    for (size_t i = 0; i < pts.size(); ++i) second[i] = pts[static_cast<size_t>(idx[i])][1];
    long long inv = merge_count(second, 0, static_cast<int>(second.size()), tmp);
    long long total = static_cast<long long>(pts.size()) * (static_cast<long long>(pts.size()) - 1) / 2;
    return 1.0 - 2.0 * static_cast<double>(inv) / static_cast<double>(total);
}

// One-sample Kolmogorov-Smirnov statistic against a cdf functor.
template <typename Cdf>
double ks_statistic(std::vector<double> draws, Cdf cdf) {
    std::sort(draws.begin(), draws.end());
    const double n = static_cast<double>(draws.size());
    double d = 0.0;
    for (size_t i = 0; i < draws.size(); ++i) {
        const double f = cdf(draws[i]);
        d = std::max(d, std::abs(f - static_cast<double>(i) / n));
        d = std::max(d, std::abs(static_cast<double>(i + 1) / n - f));
    }
    return d;
}

// Admissible unit direction with every component bounded away from zero.
inline direx::DirectionVector random_direction(direx::Rng& rng, int n) {
    Eigen::VectorXd v(n);
    for (;;) {
        for (int i = 0; i < n; ++i) {
            // Box-Muller pair; only the cosine branch is used.
            const double u1 = rng.uniform();
            const double u2 = rng.uniform();
            v(i) = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
        }
        const double norm = v.norm();
        if (norm < 1e-6) continue;
        v /= norm;
        bool ok = true;
        for (int i = 0; i < n; ++i) {
            if (std::abs(v(i)) < 1e-3) {
                ok = false;
                break;
            }
        }
        if (ok) return direx::DirectionVector::normalized(v);
    }
}

// Standard normal draw from the shared test RNG.
inline double normal_draw(direx::Rng& rng) {
    const double u1 = rng.uniform();
    const double u2 = rng.uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

// i.i.d. rows with independent standard normal columns.
inline direx::Sample normal_sample(direx::Rng& rng, int m, int n) {
    Eigen::MatrixXd data(m, n);
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < n; ++j) {
            data(i, j) = normal_draw(rng);
        }
    }
    return direx::Sample::unnamed(std::move(data));
}

}  // namespace testsup
