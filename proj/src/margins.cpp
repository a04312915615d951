#include "direx/margins.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "direx/errors.hpp"
#include "direx/rng.hpp"

namespace direx {

namespace {

constexpr double kGumbelShapeTol = 1e-12;

void check_q(double q) {
    if (!(q > 0.0 && q < 1.0)) {
        throw QOutOfRangeError("quantile level must lie strictly inside (0, 1), got " +
                               std::to_string(q));
    }
}

}  // namespace

void GevParams::validate() const {
    if (!(scale > 0.0) || !std::isfinite(scale) || !std::isfinite(location) ||
        !std::isfinite(shape)) {
        throw ConfigInvalidError("gev margin needs finite parameters and scale > 0");
    }
}

bool GevParams::gumbel_branch() const { return std::abs(shape) < kGumbelShapeTol; }

double gev_cdf(const GevParams& p, double x) {
    p.validate();
    const double z = (x - p.location) / p.scale;
    if (p.gumbel_branch()) {
        return std::exp(-std::exp(-z));
    }
    const double t = 1.0 + p.shape * z;
    if (t <= 0.0) {
        // Outside the support: below it for heavy shapes, above it for
        // bounded ones.  Clamp to the appropriate endpoint value.
        return p.shape > 0.0 ? 0.0 : 1.0;
    }
    return std::exp(-std::pow(t, -1.0 / p.shape));
}

double gev_survival(const GevParams& p, double x) { return 1.0 - gev_cdf(p, x); }

double gev_quantile(const GevParams& p, double q) {
    p.validate();
    check_q(q);
    const double w = -std::log(q);
    if (p.gumbel_branch()) {
        return p.location - p.scale * std::log(w);
    }
    return p.location + p.scale / p.shape * (std::pow(w, -p.shape) - 1.0);
}

std::vector<double> gev_sample(const GevParams& p, int count, std::uint64_t seed) {
    p.validate();
    if (count < 0) {
        throw ConfigInvalidError("sample count must be non-negative");
    }
    Rng rng(seed);
    std::vector<double> out(static_cast<size_t>(count));
    for (auto& x : out) {
        x = gev_quantile(p, rng.uniform());
    }
    return out;
}

double standard_normal_cdf(double x) { return 0.5 * std::erfc(-x * M_SQRT1_2); }

// Wichura's rational approximations for the normal quantile (the widely used
// PPND16 fit): relative error below 1e-15 across the full open interval.
double standard_normal_quantile(double p) {
    check_q(p);
    const double q = p - 0.5;
    double r;
    if (std::abs(q) <= 0.425) {
        r = 0.180625 - q * q;
        return q *
               (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r +
                     6.7265770927008700853e4) * r + 4.5921953931549871457e4) * r +
                   1.3731693765509461125e4) * r + 1.9715909503065514427e3) * r +
                 1.3314166789178437745e2) * r + 3.3871328727963666080e0) /
               (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r +
                     3.9307895800092710610e4) * r + 2.1213794301586595867e4) * r +
                   5.3941960214247511077e3) * r + 6.8718700749205790830e2) * r +
                 4.2313330701600911252e1) * r + 1.0);
    }
    r = q < 0.0 ? p : 1.0 - p;
    r = std::sqrt(-std::log(r));
    double value;
    if (r <= 5.0) {
        r -= 1.6;
        value = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                      2.41780725177450611770e-1) * r + 1.27045825245236838258e0) * r +
                    3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r +
                  4.63033784615654529590e0) * r + 1.42343711074968357734e0) /
                (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                      1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
                    6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r +
                  2.05319162663775882187e0) * r + 1.0);
    } else {
        r -= 5.0;
        value = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                      1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
                    2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r +
                  5.46378491116411436990e0) * r + 6.65790464350110377720e0) /
                (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                      1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
                    1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
                  5.99832206555887937690e-1) * r + 1.0);
    }
    return q < 0.0 ? -value : value;
}

void GaussianParams::validate() const {
    if (!(variance > 0.0) || !std::isfinite(variance) || !std::isfinite(mean)) {
        throw ConfigInvalidError("gaussian margin needs finite mean and variance > 0");
    }
}

double gaussian_cdf(const GaussianParams& p, double x) {
    p.validate();
    return standard_normal_cdf((x - p.mean) / std::sqrt(p.variance));
}

double gaussian_quantile(const GaussianParams& p, double q) {
    p.validate();
    return p.mean + std::sqrt(p.variance) * standard_normal_quantile(q);
}

double marginal_cdf(const MarginalParams& p, double x) {
    if (const auto* gev = std::get_if<GevParams>(&p)) {
        return gev_cdf(*gev, x);
    }
    if (const auto* g = std::get_if<GaussianParams>(&p)) {
        return gaussian_cdf(*g, x);
    }
    return std::clamp(x, 0.0, 1.0);
}

double marginal_quantile(const MarginalParams& p, double q) {
    if (const auto* gev = std::get_if<GevParams>(&p)) {
        return gev_quantile(*gev, q);
    }
    if (const auto* g = std::get_if<GaussianParams>(&p)) {
        return gaussian_quantile(*g, q);
    }
    check_q(q);
    return q;
}

namespace {

// Midpoint sum of f over (0, 1) with cells cells.
double midpoint_integral(const std::function<double(double)>& f, int cells) {
    double acc = 0.0;
    const double w = 1.0 / static_cast<double>(cells);
    for (int i = 0; i < cells; ++i) {
        acc += f((static_cast<double>(i) + 0.5) * w);
    }
    return acc * w;
}

// Integrates f at grid, grid/2 and grid/4 cells and requires the refinement
// differences to shrink.  For an integrable quantile transform the midpoint
// sums converge and the second difference is strictly smaller; for a
// divergent moment the tail cells keep growing as the grid refines, so the
// differences stall or grow.
double converging_integral(const std::function<double(double)>& f, int cells,
                           const char* what) {
    const double coarse = midpoint_integral(f, cells / 4);
    const double mid = midpoint_integral(f, cells / 2);
    const double fine = midpoint_integral(f, cells);
    if (!std::isfinite(coarse) || !std::isfinite(mid) || !std::isfinite(fine)) {
        throw NonFiniteMomentError(std::string(what) + " integrand overflows on the grid");
    }
    const double d1 = std::abs(mid - coarse);
    const double d2 = std::abs(fine - mid);
    const double floor = 1e-9 * (1.0 + std::abs(fine));
    if (d2 > floor && d2 > 0.95 * d1) {
        throw NonFiniteMomentError(std::string(what) +
                                   " fails the Cauchy refinement check; the moment diverges");
    }
    return fine;
}

}  // namespace

Moments marginal_moments(const std::function<double(double)>& quantile, int grid_size) {
    if (grid_size < 1000) {
        throw ConfigInvalidError("moment grid must have at least 1000 cells");
    }
    Moments m;
    m.mean = converging_integral(quantile, grid_size, "mean");
    const double mean = m.mean;
    m.variance = converging_integral(
        [&](double q) {
            const double d = quantile(q) - mean;
            return d * d;
        },
        grid_size, "variance");
    return m;
}

}  // namespace direx
