#include "direx/copulas.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <string>
#include <utility>

#include "direx/errors.hpp"

namespace direx {

namespace {

// Gauss-Legendre half-rules used by the bivariate normal quadrature; the
// classic 6/12/20-point sets, stored as (node, weight) pairs for the
// positive half of [-1, 1].
constexpr double kGl6X[] = {0.9324695142031521, 0.6612093864662645, 0.2386191860831969};
constexpr double kGl6W[] = {0.1713244923791704, 0.3607615730481386, 0.4679139345726910};
constexpr double kGl12X[] = {0.9815606342467192, 0.9041172563704749, 0.7699026741943047,
                             0.5873179542866175, 0.3678314989981802, 0.1252334085114689};
constexpr double kGl12W[] = {0.0471753363865118, 0.1069393259953184, 0.1600783285433462,
                             0.2031674267230659, 0.2334925365383548, 0.2491470458134028};
constexpr double kGl20X[] = {0.9931285991850949, 0.9639719272779138, 0.9122344282513259,
                             0.8391169718222188, 0.7463319064601508, 0.6360536807265150,
                             0.5108670019508271, 0.3737060887154195, 0.2277858511416451,
                             0.0765265211334973};
constexpr double kGl20W[] = {0.0176140071391521, 0.0406014298003869, 0.0626720483341091,
                             0.0832767415767048, 0.1019301198172404, 0.1181945319615184,
                             0.1316886384491766, 0.1420961093183820, 0.1491729864726037,
                             0.1527533871307258};

double phid(double x) { return standard_normal_cdf(x); }

// Upper-orthant probability P(X > dh, Y > dk) for a standard bivariate
// normal pair; the layout follows the well-known quadrature scheme that
// integrates over the correlation angle for moderate |r| and switches to a
// transformed tail integral (plus analytic correction terms) close to
// |r| = 1, where the angular integrand degenerates.
double bvnu(double dh, double dk, double r) {
    constexpr double kInf = std::numeric_limits<double>::infinity();
    if (dh == kInf || dk == kInf) {
        return 0.0;
    }
    if (dh == -kInf) {
        return dk == -kInf ? 1.0 : phid(-dk);
    }
    if (dk == -kInf) {
        return phid(-dh);
    }
    if (r == 0.0) {
        return phid(-dh) * phid(-dk);
    }

    const double* gx;
    const double* gw;
    int half_points;
    if (std::abs(r) < 0.3) {
        gx = kGl6X;
        gw = kGl6W;
        half_points = 3;
    } else if (std::abs(r) < 0.75) {
        gx = kGl12X;
        gw = kGl12W;
        half_points = 6;
    } else {
        gx = kGl20X;
        gw = kGl20W;
        half_points = 10;
    }

    const double twopi = 2.0 * M_PI;
    double h = dh;
    double k = dk;
    double hk = h * k;
    double bvn = 0.0;

    if (std::abs(r) < 0.925) {
        const double hs = (h * h + k * k) / 2.0;
        const double asr = std::asin(r);
        for (int i = 0; i < half_points; ++i) {
            for (int sign = -1; sign <= 1; sign += 2) {
                const double sn = std::sin(asr * (sign * gx[i] + 1.0) / 2.0);
                bvn += gw[i] * std::exp((sn * hk - hs) / (1.0 - sn * sn));
            }
        }
        bvn = bvn * asr / (2.0 * twopi) + phid(-h) * phid(-k);
        return bvn;
    }

    if (r < 0.0) {
        k = -k;
        hk = -hk;
    }
    if (std::abs(r) < 1.0) {
        const double as = (1.0 - r) * (1.0 + r);
        double a = std::sqrt(as);
        const double bs = (h - k) * (h - k);
        const double c = (4.0 - hk) / 8.0;
        const double d = (12.0 - hk) / 16.0;
        double asr = -(bs / as + hk) / 2.0;
        if (asr > -100.0) {
            bvn = a * std::exp(asr) *
                  (1.0 - c * (bs - as) * (1.0 - d * bs / 5.0) / 3.0 + c * d * as * as / 5.0);
        }
        if (-hk < 100.0) {
            const double b = std::sqrt(bs);
            bvn -= std::exp(-hk / 2.0) * std::sqrt(twopi) * phid(-b / a) * b *
                   (1.0 - c * bs * (1.0 - d * bs / 5.0) / 3.0);
        }
        a /= 2.0;
        for (int i = 0; i < half_points; ++i) {
            for (int sign = -1; sign <= 1; sign += 2) {
                const double xs_sqrt = a * (sign * gx[i] + 1.0);
                const double xs = xs_sqrt * xs_sqrt;
                const double rs = std::sqrt(1.0 - xs);
                asr = -(bs / xs + hk) / 2.0;
                if (asr > -100.0) {
                    const double sp = 1.0 + c * xs * (1.0 + d * xs);
                    const double ep = std::exp(-hk * (1.0 - rs) / (2.0 * (1.0 + rs))) / rs;
                    bvn += a * gw[i] * std::exp(asr) * (ep - sp);
                }
            }
        }
        bvn = -bvn / twopi;
    }
    if (r > 0.0) {
        bvn += phid(-std::max(h, k));
    } else {
        bvn = -bvn;
        if (k > h) {
            bvn += phid(k) - phid(h);
        }
    }
    return bvn;
}

void check_unit_square(double v1, double v2) {
    if (!(v1 >= 0.0 && v1 <= 1.0 && v2 >= 0.0 && v2 <= 1.0)) {
        throw OutOfUnitSquareError("copula arguments (" + std::to_string(v1) + ", " +
                                   std::to_string(v2) + ") leave the closed unit square");
    }
}

}  // namespace

double bivariate_normal_cdf(double x, double y, double rho) {
    if (!(rho >= -1.0 && rho <= 1.0)) {
        throw ConfigInvalidError("correlation must lie in [-1, 1]");
    }
    if (rho == 1.0) {
        return phid(std::min(x, y));
    }
    if (rho == -1.0) {
        return std::max(0.0, phid(x) + phid(y) - 1.0);
    }
    return bvnu(-x, -y, rho);
}

const char* to_string(CopulaFamily family) {
    switch (family) {
        case CopulaFamily::Independence: return "independence";
        case CopulaFamily::Gaussian: return "gaussian";
        case CopulaFamily::Frank: return "frank";
        case CopulaFamily::Gumbel: return "gumbel";
    }
    return "?";
}

const char* to_string(CopulaOrientation orientation) {
    switch (orientation) {
        case CopulaOrientation::Plain: return "plain";
        case CopulaOrientation::Survival: return "survival";
        case CopulaOrientation::Rot90: return "rot90";
        case CopulaOrientation::Rot270: return "rot270";
    }
    return "?";
}

CopulaModel::CopulaModel(CopulaFamily f, double parameter, CopulaOrientation o)
    : family_(f), parameter_(parameter), orientation_(o) {}

CopulaModel CopulaModel::independence(CopulaOrientation o) {
    return CopulaModel(CopulaFamily::Independence, 0.0, o);
}

CopulaModel CopulaModel::gaussian(double rho, CopulaOrientation o) {
    if (!(rho > -1.0 && rho < 1.0)) {
        throw ConfigInvalidError("gaussian copula needs rho strictly inside (-1, 1)");
    }
    return CopulaModel(CopulaFamily::Gaussian, rho, o);
}

CopulaModel CopulaModel::frank(double theta, CopulaOrientation o) {
    if (!(theta != 0.0) || !std::isfinite(theta)) {
        throw ConfigInvalidError("frank copula needs finite theta != 0");
    }
    return CopulaModel(CopulaFamily::Frank, theta, o);
}

CopulaModel CopulaModel::gumbel(double theta, CopulaOrientation o) {
    if (!(theta >= 1.0) || !std::isfinite(theta)) {
        throw ConfigInvalidError("gumbel copula needs theta >= 1");
    }
    return CopulaModel(CopulaFamily::Gumbel, theta, o);
}

double CopulaModel::base_cdf(double v1, double v2) const {
    // Grounding cases first: they must hold exactly, and they also keep the
    // numerical kernels away from their singular corners.
    if (v1 == 0.0 || v2 == 0.0) {
        return 0.0;
    }
    if (v1 == 1.0) {
        return v2;
    }
    if (v2 == 1.0) {
        return v1;
    }
    switch (family_) {
        case CopulaFamily::Independence:
            return v1 * v2;
        case CopulaFamily::Gaussian:
            return bivariate_normal_cdf(standard_normal_quantile(v1),
                                        standard_normal_quantile(v2), parameter_);
        case CopulaFamily::Frank: {
            const double theta = parameter_;
            return -std::log1p(std::expm1(-theta * v1) * std::expm1(-theta * v2) /
                               std::expm1(-theta)) /
                   theta;
        }
        case CopulaFamily::Gumbel: {
            const double theta = parameter_;
            const double s = std::pow(-std::log(v1), theta) + std::pow(-std::log(v2), theta);
            return std::exp(-std::pow(s, 1.0 / theta));
        }
    }
    return 0.0;
}

double CopulaModel::cdf(double v1, double v2) const {
    check_unit_square(v1, v2);
    switch (orientation_) {
        case CopulaOrientation::Plain:
            return base_cdf(v1, v2);
        case CopulaOrientation::Survival:
            return v1 + v2 - 1.0 + base_cdf(1.0 - v1, 1.0 - v2);
        case CopulaOrientation::Rot90:
            return v1 - base_cdf(v1, 1.0 - v2);
        case CopulaOrientation::Rot270:
            return v2 - base_cdf(1.0 - v1, v2);
    }
    return 0.0;
}

namespace {

// Inverse conditional draw for the Gumbel family.  The conditional
// distribution of V2 given V1 = v1 has no closed-form inverse, so we bisect
// its cdf
//   F(v2 | v1) = exp(-s^{1/t} + (1/t - 1) ln s + (t - 1) ln x1 + x1),
//   x_i = -ln v_i,  s = x1^t + x2^t,
// which is continuous and strictly increasing in v2.
double gumbel_conditional_inverse(double theta, double v1, double w) {
    const double x1 = -std::log(v1);
    const double log_x1 = std::log(x1);
    const auto conditional = [&](double v2) {
        const double x2 = -std::log(v2);
        const double s = std::pow(x1, theta) + std::pow(x2, theta);
        const double log_s = std::log(s);
        return std::exp(-std::pow(s, 1.0 / theta) + (1.0 / theta - 1.0) * log_s +
                        (theta - 1.0) * log_x1 + x1);
    };
    double lo = 0.0;
    double hi = 1.0;
    for (int iter = 0; iter < 200; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (conditional(mid) < w) {
            lo = mid;
        } else {
            hi = mid;
        }
        if (hi - lo <= 1e-12) {
            return 0.5 * (lo + hi);
        }
    }
    throw BisectionFailureError("gumbel conditional inversion failed to bracket within 200 steps");
}

}  // namespace

std::array<double, 2> CopulaModel::sample_one(Rng& rng) const {
    const double v1 = rng.uniform();
    const double w = rng.uniform();
    double v2 = w;
    switch (family_) {
        case CopulaFamily::Independence:
            break;
        case CopulaFamily::Gaussian: {
            const double rho = parameter_;
            const double z = rho * standard_normal_quantile(v1) +
                             std::sqrt(1.0 - rho * rho) * standard_normal_quantile(w);
            v2 = standard_normal_cdf(z);
            break;
        }
        case CopulaFamily::Frank: {
            const double theta = parameter_;
            const double g1 = std::expm1(-theta * v1);
            v2 = -std::log1p(w * std::expm1(-theta) / (1.0 + g1 * (1.0 - w))) / theta;
            break;
        }
        case CopulaFamily::Gumbel:
            v2 = gumbel_conditional_inverse(parameter_, v1, w);
            break;
    }
    switch (orientation_) {
        case CopulaOrientation::Plain:
            return {v1, v2};
        case CopulaOrientation::Survival:
            return {1.0 - v1, 1.0 - v2};
        case CopulaOrientation::Rot90:
            return {v1, 1.0 - v2};
        case CopulaOrientation::Rot270:
            return {1.0 - v1, v2};
    }
    return {v1, v2};
}

std::vector<std::array<double, 2>> CopulaModel::sample(int count, std::uint64_t seed) const {
    if (count < 0) {
        throw ConfigInvalidError("sample count must be non-negative");
    }
    Rng rng(seed);
    std::vector<std::array<double, 2>> out(static_cast<size_t>(count));
    for (auto& p : out) {
        p = sample_one(rng);
    }
    return out;
}

CopulaTree CopulaTree::pair(CopulaModel copula, int first_coord, int second_coord) {
    if (first_coord < 0 || second_coord < 0 || first_coord == second_coord) {
        throw TreeInvalidError("pair node needs two distinct non-negative coordinates");
    }
    return CopulaTree(PairNode{std::move(copula), first_coord, second_coord});
}

CopulaTree CopulaTree::product(int independent_coord, CopulaTree sub) {
    if (independent_coord < 0) {
        throw TreeInvalidError("product node needs a non-negative coordinate");
    }
    return CopulaTree(ProductNode{independent_coord,
                                  std::make_shared<const CopulaTree>(std::move(sub))});
}

double CopulaTree::eval(const std::vector<double>& v) const {
    if (const auto* pair_node = std::get_if<PairNode>(&node_)) {
        return pair_node->copula.cdf(v[static_cast<size_t>(pair_node->a)],
                                     v[static_cast<size_t>(pair_node->b)]);
    }
    const auto& prod = std::get<ProductNode>(node_);
    const double vk = v[static_cast<size_t>(prod.coord)];
    if (!(vk >= 0.0 && vk <= 1.0)) {
        throw OutOfUnitSquareError("coordinate " + std::to_string(prod.coord) +
                                   " leaves the closed unit interval");
    }
    return vk * prod.sub->eval(v);
}

void CopulaTree::sample_into(Rng& rng, std::vector<double>& out) const {
    if (const auto* pair_node = std::get_if<PairNode>(&node_)) {
        const auto p = pair_node->copula.sample_one(rng);
        out[static_cast<size_t>(pair_node->a)] = p[0];
        out[static_cast<size_t>(pair_node->b)] = p[1];
        return;
    }
    const auto& prod = std::get<ProductNode>(node_);
    prod.sub->sample_into(rng, out);
    out[static_cast<size_t>(prod.coord)] = rng.uniform();
}

bool CopulaTree::is_pair() const { return std::holds_alternative<PairNode>(node_); }

const CopulaModel& CopulaTree::pair_copula() const { return std::get<PairNode>(node_).copula; }

int CopulaTree::pair_first() const { return std::get<PairNode>(node_).a; }

int CopulaTree::pair_second() const { return std::get<PairNode>(node_).b; }

int CopulaTree::product_coord() const { return std::get<ProductNode>(node_).coord; }

const CopulaTree& CopulaTree::product_sub() const { return *std::get<ProductNode>(node_).sub; }

void CopulaTree::collect_coords(std::vector<int>& coords) const {
    if (const auto* pair_node = std::get_if<PairNode>(&node_)) {
        coords.push_back(pair_node->a);
        coords.push_back(pair_node->b);
        return;
    }
    const auto& prod = std::get<ProductNode>(node_);
    prod.sub->collect_coords(coords);
    coords.push_back(prod.coord);
}

JointModel::JointModel(std::vector<MarginalParams> marginals, CopulaTree tree,
                       std::vector<std::string> names)
    : marginals_(std::move(marginals)), tree_(std::move(tree)), names_(std::move(names)) {
    const int n = dim();
    if (n < 2) {
        throw TreeInvalidError("joint model needs at least two coordinates");
    }
    std::vector<int> coords;
    tree_.collect_coords(coords);
    std::set<int> seen;
    for (int c : coords) {
        if (c < 0 || c >= n) {
            throw TreeInvalidError("tree references coordinate " + std::to_string(c) +
                                   " outside [0, " + std::to_string(n) + ")");
        }
        if (!seen.insert(c).second) {
            throw TreeInvalidError("tree covers coordinate " + std::to_string(c) + " twice");
        }
    }
    if (static_cast<int>(seen.size()) != n) {
        throw TreeInvalidError("tree covers " + std::to_string(seen.size()) + " of " +
                               std::to_string(n) + " coordinates");
    }
    for (const auto& m : marginals_) {
        if (const auto* gev = std::get_if<GevParams>(&m)) {
            gev->validate();
        } else if (const auto* g = std::get_if<GaussianParams>(&m)) {
            g->validate();
        }
    }
    if (names_.empty()) {
        for (int j = 0; j < n; ++j) {
            names_.push_back("x" + std::to_string(j + 1));
        }
    } else if (static_cast<int>(names_.size()) != n) {
        throw LengthMismatchError("joint model has " + std::to_string(n) + " coordinates but " +
                                  std::to_string(names_.size()) + " names");
    }
}

double JointModel::nested_cdf(const std::vector<double>& v) const {
    if (static_cast<int>(v.size()) != dim()) {
        throw DimensionMismatchError("nested cdf argument has dimension " +
                                     std::to_string(v.size()) + ", model has " +
                                     std::to_string(dim()));
    }
    for (double x : v) {
        if (!(x >= 0.0 && x <= 1.0)) {
            throw OutOfUnitSquareError("nested cdf argument leaves the closed unit cube");
        }
    }
    return tree_.eval(v);
}

std::vector<std::vector<double>> JointModel::sample_copula(int count, std::uint64_t seed) const {
    if (count < 0) {
        throw ConfigInvalidError("sample count must be non-negative");
    }
    Rng rng(seed);
    std::vector<std::vector<double>> out(static_cast<size_t>(count),
                                         std::vector<double>(static_cast<size_t>(dim())));
    for (auto& row : out) {
        tree_.sample_into(rng, row);
    }
    return out;
}

Sample sklar_transform(const JointModel& model, const std::vector<std::vector<double>>& points,
                       MarginalMap map) {
    const int n = model.dim();
    Eigen::MatrixXd rows(static_cast<Eigen::Index>(points.size()), n);
    for (size_t i = 0; i < points.size(); ++i) {
        if (static_cast<int>(points[i].size()) != n) {
            throw DimensionMismatchError("copula point " + std::to_string(i) +
                                         " has the wrong dimension");
        }
        for (int j = 0; j < n; ++j) {
            const double v = points[i][static_cast<size_t>(j)];
            const double q = map == MarginalMap::Distribution ? v : 1.0 - v;
            rows(static_cast<Eigen::Index>(i), j) =
                marginal_quantile(model.marginals()[static_cast<size_t>(j)], q);
        }
    }
    return Sample(std::move(rows), model.names());
}

Sample sample_joint(const JointModel& model, int count, std::uint64_t seed, MarginalMap map) {
    return sklar_transform(model, model.sample_copula(count, seed), map);
}

CopulaLevelSets copula_level_sets(const CopulaModel& c, double alpha, int grid) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw ConfigInvalidError("alpha must lie in (0, 1)");
    }
    if (grid < 100) {
        throw ConfigInvalidError("level-set grid must have at least 100 points per axis");
    }
    CopulaLevelSets out;
    out.alpha = alpha;
    out.grid = grid;
    out.band_tolerance = 1.0 / static_cast<double>(grid);
    const double step = 1.0 / static_cast<double>(grid - 1);
    for (int i = 0; i < grid; ++i) {
        const double v1 = static_cast<double>(i) * step;
        for (int j = 0; j < grid; ++j) {
            const double v2 = static_cast<double>(j) * step;
            const double value = c.cdf(v1, v2);
            const LevelSetPoint point{v1, v2, value};
            if (std::abs(value - alpha) <= out.band_tolerance) {
                out.quantile_band.push_back(point);
            } else if (value < alpha) {
                out.upper.push_back(point);
            } else {
                out.lower.push_back(point);
            }
        }
    }
    return out;
}

void BivariateGaussianSpec::validate() const {
    first.validate();
    second.validate();
    if (!(rho > -1.0 && rho < 1.0)) {
        throw ConfigInvalidError("correlation must lie strictly inside (-1, 1)");
    }
}

BivariateGaussianSpec rotated_gaussian_params(const BivariateGaussianSpec& g,
                                              const DirectionVector& u) {
    g.validate();
    if (u.dim() != 2) {
        throw DimensionMismatchError("rotated-gaussian closed forms are bivariate; direction has "
                                     "dimension " + std::to_string(u.dim()));
    }
    const RotationMatrix r = build_rotation(u);
    Eigen::Vector2d mu(g.first.mean, g.second.mean);
    const double s1 = std::sqrt(g.first.variance);
    const double s2 = std::sqrt(g.second.variance);
    Eigen::Matrix2d sigma;
    sigma << g.first.variance, g.rho * s1 * s2, g.rho * s1 * s2, g.second.variance;

    const Eigen::Vector2d mu_rot = r.entries() * mu;
    const Eigen::Matrix2d sigma_rot = r.entries() * sigma * r.entries().transpose();

    BivariateGaussianSpec out;
    out.first = GaussianParams{mu_rot(0), sigma_rot(0, 0)};
    out.second = GaussianParams{mu_rot(1), sigma_rot(1, 1)};
    out.rho = sigma_rot(0, 1) / std::sqrt(sigma_rot(0, 0) * sigma_rot(1, 1));
    return out;
}

}  // namespace direx
