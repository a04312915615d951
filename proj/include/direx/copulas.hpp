#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "direx/geometry.hpp"
#include "direx/margins.hpp"
#include "direx/rng.hpp"
#include "direx/sample.hpp"

namespace direx {

// P(X <= x, Y <= y) for a standard bivariate normal pair with correlation
// rho, by fixed-order Gauss-Legendre quadrature (deterministic, accurate to
// well below 1e-7 over the whole parameter range).
double bivariate_normal_cdf(double x, double y, double rho);

enum class CopulaFamily { Independence, Gaussian, Frank, Gumbel };

// How the base family is oriented inside the unit square.  Survival pairs
// both coordinates with their complements; the half-rotations flip one
// coordinate each.  All three are genuine copulas of the transformed pair,
// so they keep uniform margins:
//   survival: v1 + v2 - 1 + C(1-v1, 1-v2)
//   rot90:    v1 - C(v1, 1-v2)
//   rot270:   v2 - C(1-v1, v2)
enum class CopulaOrientation { Plain, Survival, Rot90, Rot270 };

const char* to_string(CopulaFamily family);
const char* to_string(CopulaOrientation orientation);

class CopulaModel {
public:
    static CopulaModel independence(CopulaOrientation o = CopulaOrientation::Plain);
    static CopulaModel gaussian(double rho, CopulaOrientation o = CopulaOrientation::Plain);
    static CopulaModel frank(double theta, CopulaOrientation o = CopulaOrientation::Plain);
    static CopulaModel gumbel(double theta, CopulaOrientation o = CopulaOrientation::Plain);

    CopulaFamily family() const { return family_; }
    CopulaOrientation orientation() const { return orientation_; }
    double parameter() const { return parameter_; }

    // C(v1, v2) including the orientation transform.  Arguments must lie in
    // the closed unit square.
    double cdf(double v1, double v2) const;

    // Draws by conditional inversion: v1 uniform, then v2 from the inverse
    // conditional distribution (closed form for the Gaussian and Frank
    // families, bisection to 1e-12 for Gumbel).  Orientations reuse the base
    // sampler and flip the appropriate coordinates afterwards.
    std::vector<std::array<double, 2>> sample(int count, std::uint64_t seed) const;
    std::array<double, 2> sample_one(Rng& rng) const;

private:
    CopulaModel(CopulaFamily f, double parameter, CopulaOrientation o);

    double base_cdf(double v1, double v2) const;

    CopulaFamily family_;
    double parameter_;
    CopulaOrientation orientation_;
};

// A nesting tree describing the dependence of an n-variate model on the unit
// cube.  Leaves couple two coordinates through a bivariate copula; product
// nodes adjoin one independent coordinate to a sub-tree:
//   C(v) = v_k * C_sub(rest).
class CopulaTree {
public:
    static CopulaTree pair(CopulaModel copula, int first_coord, int second_coord);
    static CopulaTree product(int independent_coord, CopulaTree sub);

    double eval(const std::vector<double>& v) const;
    void sample_into(Rng& rng, std::vector<double>& out) const;
    void collect_coords(std::vector<int>& coords) const;

    // Structural accessors (for serialisation and inspection).
    bool is_pair() const;
    const CopulaModel& pair_copula() const;
    int pair_first() const;
    int pair_second() const;
    int product_coord() const;
    const CopulaTree& product_sub() const;

private:
    struct PairNode {
        CopulaModel copula;
        int a, b;
    };
    struct ProductNode {
        int coord;
        std::shared_ptr<const CopulaTree> sub;
    };

    explicit CopulaTree(std::variant<PairNode, ProductNode> node) : node_(std::move(node)) {}

    std::variant<PairNode, ProductNode> node_;
};

// Full joint model: one marginal per coordinate plus the dependence tree.
// Validated so the tree covers every coordinate exactly once.
class JointModel {
public:
    JointModel(std::vector<MarginalParams> marginals, CopulaTree tree,
               std::vector<std::string> names = {});

    int dim() const { return static_cast<int>(marginals_.size()); }
    const std::vector<MarginalParams>& marginals() const { return marginals_; }
    const CopulaTree& tree() const { return tree_; }
    const std::vector<std::string>& names() const { return names_; }

    // Copula value at a point of the closed unit cube.
    double nested_cdf(const std::vector<double>& v) const;

    // count draws from the dependence tree, each a point of the unit cube.
    std::vector<std::vector<double>> sample_copula(int count, std::uint64_t seed) const;

private:
    std::vector<MarginalParams> marginals_;
    CopulaTree tree_;
    std::vector<std::string> names_;
};

// Which inverse the marginal mapping applies to unit-cube coordinates.
// Distribution: x = F^{-1}(v).  Survival: x = F^{-1}(1 - v), i.e. v is an
// exceedance probability.
enum class MarginalMap { Distribution, Survival };

// Maps unit-cube points through the model's marginal quantiles, producing a
// data-scale sample with the model's column names.
Sample sklar_transform(const JointModel& model, const std::vector<std::vector<double>>& points,
                       MarginalMap map = MarginalMap::Distribution);

// Convenience: sample the dependence tree and push through the marginals.
Sample sample_joint(const JointModel& model, int count, std::uint64_t seed,
                    MarginalMap map = MarginalMap::Distribution);

// Lattice classification of the unit square against the level-alpha set of
// the given copula (pass a survival-oriented model to draw exceedance
// curves).  A lattice point lands in the quantile band when its copula value
// is within 1/grid of alpha; otherwise below-alpha points are "upper"
// (more extreme) and above-alpha points "lower".
struct LevelSetPoint {
    double v1, v2, value;
};

struct CopulaLevelSets {
    std::vector<LevelSetPoint> quantile_band, upper, lower;
    double alpha = 0.0;
    int grid = 0;
    double band_tolerance = 0.0;
};

CopulaLevelSets copula_level_sets(const CopulaModel& c, double alpha, int grid);

// Closed-form image of a bivariate Gaussian model under the orthant rotation
// for direction u: means rotate as R mu, the covariance as R Sigma R', and
// the new correlation is the off-diagonal entry normalised by the new
// standard deviations.  The covariance trace is invariant.
struct BivariateGaussianSpec {
    GaussianParams first, second;
    double rho = 0.0;

    void validate() const;
};

BivariateGaussianSpec rotated_gaussian_params(const BivariateGaussianSpec& g,
                                              const DirectionVector& u);

}  // namespace direx
