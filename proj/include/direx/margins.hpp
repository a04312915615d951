#pragma once

#include <cstdint>
#include <functional>
#include <variant>
#include <vector>

namespace direx {

// Generalised extreme value margin.  Shape gamma > 0 gives the heavy upper
// tail (support bounded below), gamma < 0 the bounded upper tail, and values
// within 1e-12 of zero are evaluated on the Gumbel branch, where the two
// analytic formulas meet in the limit.
struct GevParams {
    double location = 0.0;  // epsilon
    double scale = 1.0;     // beta > 0
    double shape = 0.0;     // gamma

    void validate() const;
    bool gumbel_branch() const;
};

struct GaussianParams {
    double mean = 0.0;
    double variance = 1.0;

    void validate() const;
};

// Identity margin on [0, 1]; quantile and cdf are the identity map.  Mostly
// useful for tests and for models whose coordinates are already uniform.
struct UniformUnitParams {};

using MarginalParams = std::variant<GevParams, GaussianParams, UniformUnitParams>;

double gev_cdf(const GevParams& p, double x);
double gev_survival(const GevParams& p, double x);
double gev_quantile(const GevParams& p, double q);  // q in (0, 1)
std::vector<double> gev_sample(const GevParams& p, int count, std::uint64_t seed);

double standard_normal_cdf(double x);
double standard_normal_quantile(double p);  // p in (0, 1)

double gaussian_cdf(const GaussianParams& p, double x);
double gaussian_quantile(const GaussianParams& p, double q);

double marginal_cdf(const MarginalParams& p, double x);
double marginal_quantile(const MarginalParams& p, double q);

struct Moments {
    double mean = 0.0;
    double variance = 0.0;
};

// Mean and variance of the distribution with the given quantile function,
// computed by midpoint quadrature of F^{-1} over (0, 1) on a grid of
// grid_size cells (grid_size >= 1000).  Divergent moments are detected by a
// Cauchy criterion on a dyadic refinement of the grid: if the refinement
// differences stop shrinking, the partial sums are not converging and a
// NonFiniteMomentError is raised instead of returning garbage.
Moments marginal_moments(const std::function<double(double)>& quantile, int grid_size);

}  // namespace direx
