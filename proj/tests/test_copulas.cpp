#include <doctest.h>

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "direx/copulas.hpp"
#include "direx/errors.hpp"
#include "direx/margins.hpp"
#include "direx/rng.hpp"
#include "direx/sample.hpp"
#include "support.hpp"

using direx::CopulaFamily;
using direx::CopulaModel;
using direx::CopulaOrientation;
using direx::CopulaTree;
using direx::JointModel;

namespace {

std::vector<std::array<double, 2>> grid_points() {
    std::vector<std::array<double, 2>> pts;
    for (double a = 0.0; a <= 1.0; a += 0.125) {
        for (double b = 0.0; b <= 1.0; b += 0.125) {
            pts.push_back({a, b});
        }
    }
    return pts;
}

std::vector<CopulaModel> family_zoo(CopulaOrientation o) {
    return {CopulaModel::independence(o), CopulaModel::gaussian(0.2, o),
            CopulaModel::gaussian(-0.7, o), CopulaModel::frank(5.0, o),
            CopulaModel::frank(-8.0, o),   CopulaModel::gumbel(3.1378, o)};
}

double empirical_cdf_at(const std::vector<std::array<double, 2>>& draws, double a,
                        double b) {
    int hits = 0;
    for (const auto& d : draws) {
        if (d[0] <= a && d[1] <= b) {
            ++hits;
        }
    }
    return static_cast<double>(hits) / static_cast<double>(draws.size());
}

}  // namespace

TEST_CASE("frozen bivariate normal values") {
    CHECK(std::abs(direx::bivariate_normal_cdf(0.0, 0.0, 0.5) - 1.0 / 3.0) <= 1e-14);
    CHECK(std::abs(direx::bivariate_normal_cdf(0.0, 0.0, 0.0) - 0.25) <= 1e-14);
    CHECK(std::abs(direx::bivariate_normal_cdf(1.0, 1.0, 0.99) - 0.8276930269850803) <=
          1e-12);
    CHECK(std::abs(direx::bivariate_normal_cdf(-0.5, 0.3, -0.95) - 0.018735041807098753) <=
          1e-12);
    CHECK(std::abs(direx::bivariate_normal_cdf(2.0, -1.0, 0.7) - 0.15865167132240016) <=
          1e-12);
    // Comonotone and countermonotone limits.
    CHECK(direx::bivariate_normal_cdf(0.5, -0.3, 1.0) ==
          doctest::Approx(direx::standard_normal_cdf(-0.3)).epsilon(1e-14));
    CHECK(direx::bivariate_normal_cdf(0.5, -0.3, -1.0) ==
          doctest::Approx(std::max(direx::standard_normal_cdf(0.5) +
                                       direx::standard_normal_cdf(-0.3) - 1.0,
                                   0.0))
              .epsilon(1e-13));
}

TEST_CASE("every family and orientation is grounded with uniform margins") {
    for (CopulaOrientation o :
         {CopulaOrientation::Plain, CopulaOrientation::Survival, CopulaOrientation::Rot90,
          CopulaOrientation::Rot270}) {
        for (const CopulaModel& c : family_zoo(o)) {
            for (double v = 0.0; v <= 1.0; v += 0.0625) {
                CHECK(std::abs(c.cdf(0.0, v)) <= 1e-12);
                CHECK(std::abs(c.cdf(v, 0.0)) <= 1e-12);
                CHECK(std::abs(c.cdf(1.0, v) - v) <= 1e-12);
                CHECK(std::abs(c.cdf(v, 1.0) - v) <= 1e-12);
            }
        }
    }
}

TEST_CASE("rectangle mass is never negative") {
    direx::Rng rng(211);
    for (const CopulaModel& c : family_zoo(CopulaOrientation::Plain)) {
        for (int trial = 0; trial < 200; ++trial) {
            const double a1 = rng.uniform(), a2 = rng.uniform();
            const double b1 = rng.uniform(), b2 = rng.uniform();
            const double lo1 = std::min(a1, b1), hi1 = std::max(a1, b1);
            const double lo2 = std::min(a2, b2), hi2 = std::max(a2, b2);
            const double mass =
                c.cdf(hi1, hi2) - c.cdf(lo1, hi2) - c.cdf(hi1, lo2) + c.cdf(lo1, lo2);
            CHECK(mass >= -1e-12);
        }
    }
}

TEST_CASE("frozen copula values") {
    CHECK(std::abs(CopulaModel::gaussian(0.2).cdf(0.5, 0.5) - 0.2820471084244875) <= 1e-13);
    CHECK(std::abs(CopulaModel::gaussian(0.15).cdf(0.3, 0.7) - 0.22779013568831177) <=
          1e-13);
    CHECK(std::abs(CopulaModel::gumbel(3.1378).cdf(0.5, 0.5) - 0.4212645581972984) <=
          1e-13);
    CHECK(std::abs(CopulaModel::frank(5.0).cdf(0.5, 0.5) - 0.3771485107465207) <= 1e-13);
    CHECK(std::abs(CopulaModel::frank(-8.0).cdf(0.3, 0.8) - 0.1381968312996164) <= 1e-13);
    CHECK(CopulaModel::independence().cdf(0.3, 0.8) ==
          doctest::Approx(0.24).epsilon(1e-15));
    // The Gumbel family at parameter one is independence.
    CHECK(CopulaModel::gumbel(1.0).cdf(0.3, 0.8) == doctest::Approx(0.24).epsilon(1e-12));
}

TEST_CASE("parameter domains are enforced") {
    CHECK_THROWS_AS(CopulaModel::gaussian(1.0), direx::ConfigInvalidError);
    CHECK_THROWS_AS(CopulaModel::gaussian(-1.2), direx::ConfigInvalidError);
    CHECK_THROWS_AS(CopulaModel::gumbel(0.99), direx::ConfigInvalidError);
    CHECK_THROWS_AS(CopulaModel::frank(0.0), direx::ConfigInvalidError);
    CHECK_THROWS_AS(CopulaModel::gaussian(0.2).cdf(-0.1, 0.5), direx::OutOfUnitSquareError);
    CHECK_THROWS_AS(CopulaModel::gaussian(0.2).cdf(0.1, 1.5), direx::OutOfUnitSquareError);
}

TEST_CASE("orientations match their algebra on the plain family") {
    const double theta = 3.1378;
    const CopulaModel plain = CopulaModel::gumbel(theta);
    const CopulaModel survival =
        CopulaModel::gumbel(theta, CopulaOrientation::Survival);
    const CopulaModel r90 = CopulaModel::gumbel(theta, CopulaOrientation::Rot90);
    const CopulaModel r270 = CopulaModel::gumbel(theta, CopulaOrientation::Rot270);
    for (const auto& p : grid_points()) {
        const double v1 = p[0], v2 = p[1];
        CHECK(std::abs(survival.cdf(v1, v2) -
                       (v1 + v2 - 1.0 + plain.cdf(1.0 - v1, 1.0 - v2))) <= 1e-13);
        CHECK(std::abs(r90.cdf(v1, v2) - (v1 - plain.cdf(v1, 1.0 - v2))) <= 1e-13);
        CHECK(std::abs(r270.cdf(v1, v2) - (v2 - plain.cdf(1.0 - v1, v2))) <= 1e-13);
    }
}

TEST_CASE("sampling reproduces the rank correlation of each family") {
    const int m = 20000;
    const auto gumbel = CopulaModel::gumbel(3.1378).sample(m, 5);
    CHECK(testsup::kendall_tau(gumbel) == doctest::Approx(0.681305373191408).epsilon(0.04));

    const auto frank_pos = CopulaModel::frank(5.0).sample(m, 6);
    CHECK(testsup::kendall_tau(frank_pos) ==
          doctest::Approx(0.4567009581601168).epsilon(0.05));

    const auto frank_neg = CopulaModel::frank(-8.0).sample(m, 7);
    CHECK(testsup::kendall_tau(frank_neg) ==
          doctest::Approx(-0.602619651551108).epsilon(0.04));

    const auto gauss = CopulaModel::gaussian(0.15).sample(m, 8);
    const double tau = testsup::kendall_tau(gauss);
    CHECK(std::abs(tau - 0.09585473954087376) <= 0.02);
}

TEST_CASE("sampled mass matches the cdf pointwise") {
    const int m = 40000;
    for (const CopulaModel& c :
         {CopulaModel::gumbel(3.1378), CopulaModel::frank(-8.0),
          CopulaModel::gumbel(3.1378, CopulaOrientation::Survival),
          CopulaModel::gaussian(0.4, CopulaOrientation::Rot90)}) {
        const auto draws = c.sample(m, 99);
        REQUIRE(static_cast<int>(draws.size()) == m);
        for (const auto& d : draws) {
            CHECK(d[0] > 0.0);
            CHECK(d[0] < 1.0);
            CHECK(d[1] > 0.0);
            CHECK(d[1] < 1.0);
        }
        for (const auto& p : {std::array<double, 2>{0.3, 0.4}, std::array<double, 2>{0.5, 0.5},
                              std::array<double, 2>{0.8, 0.2}}) {
            CHECK(std::abs(empirical_cdf_at(draws, p[0], p[1]) - c.cdf(p[0], p[1])) <=
                  0.012);
        }
    }
}

TEST_CASE("sampling is deterministic in the seed") {
    const auto a = CopulaModel::gumbel(3.1378).sample(100, 42);
    const auto b = CopulaModel::gumbel(3.1378).sample(100, 42);
    CHECK(a == b);
    const auto c = CopulaModel::gumbel(3.1378).sample(100, 43);
    CHECK(a != c);
}

TEST_CASE("tree evaluation multiplies independent coordinates in") {
    const CopulaTree tree =
        CopulaTree::product(2, CopulaTree::pair(CopulaModel::gumbel(3.1378), 0, 1));
    const CopulaModel base = CopulaModel::gumbel(3.1378);
    CHECK(tree.eval({0.3, 0.6, 0.5}) ==
          doctest::Approx(0.5 * base.cdf(0.3, 0.6)).epsilon(1e-15));
    CHECK(tree.eval({0.3, 0.6, 1.0}) == doctest::Approx(base.cdf(0.3, 0.6)).epsilon(1e-15));

    std::vector<int> coords;
    tree.collect_coords(coords);
    CHECK(coords.size() == 3);
    CHECK_FALSE(tree.is_pair());
    CHECK(tree.product_coord() == 2);
    CHECK(tree.product_sub().is_pair());
    CHECK(tree.product_sub().pair_first() == 0);
    CHECK(tree.product_sub().pair_second() == 1);
    CHECK(tree.product_sub().pair_copula().family() == CopulaFamily::Gumbel);
}

TEST_CASE("joint model validation covers the coordinate set") {
    const direx::MarginalParams u = direx::UniformUnitParams{};
    const CopulaTree pair01 = CopulaTree::pair(CopulaModel::frank(5.0), 0, 1);

    CHECK_NOTHROW(JointModel({u, u}, pair01));
    // Missing coordinate 2.
    CHECK_THROWS_AS(JointModel({u, u, u}, pair01), direx::TreeInvalidError);
    // Coordinate 1 used twice.
    CHECK_THROWS_AS(JointModel({u, u}, CopulaTree::product(1, pair01)),
                    direx::TreeInvalidError);
    // Out of range coordinate.
    CHECK_THROWS_AS(JointModel({u, u}, CopulaTree::pair(CopulaModel::frank(5.0), 0, 5)),
                    direx::TreeInvalidError);
    // Names must match the dimension when given.
    CHECK_THROWS_AS(JointModel({u, u}, pair01, {"only_one"}), direx::LengthMismatchError);
    // A pair node may not couple a coordinate with itself.
    CHECK_THROWS_AS(JointModel({u, u}, CopulaTree::pair(CopulaModel::frank(5.0), 1, 1)),
                    direx::TreeInvalidError);
}

TEST_CASE("nested cdf hits the cube corners exactly") {
    const direx::MarginalParams u = direx::UniformUnitParams{};
    const JointModel model(
        {u, u, u}, CopulaTree::product(2, CopulaTree::pair(CopulaModel::gumbel(2.0), 0, 1)));
    CHECK(model.nested_cdf({1.0, 1.0, 1.0}) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(model.nested_cdf({0.0, 0.5, 0.5}) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(model.nested_cdf({0.5, 0.5, 0.0}) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK_THROWS_AS(model.nested_cdf({0.5, 0.5}), direx::DimensionMismatchError);
    CHECK_THROWS_AS(model.nested_cdf({0.5, 0.5, 1.5}), direx::OutOfUnitSquareError);
}

TEST_CASE("copula draws from the tree respect pair dependence and independence") {
    const direx::MarginalParams u = direx::UniformUnitParams{};
    const JointModel model(
        {u, u, u},
        CopulaTree::product(2, CopulaTree::pair(CopulaModel::gumbel(3.1378), 0, 1)));
    const auto draws = model.sample_copula(20000, 17);
    REQUIRE(draws.size() == 20000);

    std::vector<std::array<double, 2>> pair01, pair02;
    for (const auto& d : draws) {
        REQUIRE(d.size() == 3);
        pair01.push_back({d[0], d[1]});
        pair02.push_back({d[0], d[2]});
    }
    CHECK(testsup::kendall_tau(pair01) == doctest::Approx(0.681305373191408).epsilon(0.03));
    CHECK(std::abs(testsup::kendall_tau(pair02)) <= 0.02);
}

TEST_CASE("marginal maps run the quantile on the chosen side") {
    const direx::GevParams peak{59.358, 36.203, 0.368};
    const JointModel model({direx::MarginalParams{peak}, direx::UniformUnitParams{}},
                           CopulaTree::pair(CopulaModel::frank(5.0), 0, 1),
                           {"Q", "U"});
    const std::vector<std::vector<double>> pts = {{0.3, 0.7}, {0.9, 0.1}};

    const direx::Sample dist =
        direx::sklar_transform(model, pts, direx::MarginalMap::Distribution);
    CHECK(dist.column_names() == std::vector<std::string>{"Q", "U"});
    CHECK(dist(0, 0) == doctest::Approx(direx::gev_quantile(peak, 0.3)).epsilon(1e-14));
    CHECK(dist(0, 1) == doctest::Approx(0.7).epsilon(1e-14));

    const direx::Sample surv =
        direx::sklar_transform(model, pts, direx::MarginalMap::Survival);
    CHECK(surv(0, 0) == doctest::Approx(direx::gev_quantile(peak, 0.7)).epsilon(1e-14));
    CHECK(surv(1, 1) == doctest::Approx(0.9).epsilon(1e-14));
}

TEST_CASE("joint sampling is reproducible and carries names") {
    const direx::GevParams peak{59.358, 36.203, 0.368};
    const JointModel model({direx::MarginalParams{peak}, direx::UniformUnitParams{}},
                           CopulaTree::pair(CopulaModel::frank(5.0), 0, 1),
                           {"Q", "U"});
    const direx::Sample a = direx::sample_joint(model, 50, 3);
    const direx::Sample b = direx::sample_joint(model, 50, 3);
    CHECK(a.rows() == b.rows());
    CHECK(a.column_names() == std::vector<std::string>{"Q", "U"});
    CHECK(a.size() == 50);
}

TEST_CASE("level set scan partitions the grid around the target mass") {
    const CopulaModel c = CopulaModel::gumbel(3.1378);
    const direx::CopulaLevelSets sets = direx::copula_level_sets(c, 0.05, 101);
    CHECK(sets.alpha == 0.05);
    CHECK(sets.grid == 101);
    CHECK(sets.band_tolerance == doctest::Approx(1.0 / 101.0).epsilon(1e-15));
    CHECK(sets.quantile_band.size() + sets.upper.size() + sets.lower.size() == 101u * 101u);
    CHECK_FALSE(sets.quantile_band.empty());

    for (const auto& p : sets.quantile_band) {
        CHECK(std::abs(p.value - 0.05) <= sets.band_tolerance + 1e-15);
        CHECK(std::abs(p.value - c.cdf(p.v1, p.v2)) <= 1e-15);
    }
    for (const auto& p : sets.upper) {
        CHECK(p.value < 0.05);
        CHECK(std::abs(p.value - 0.05) > sets.band_tolerance);
    }
    for (const auto& p : sets.lower) {
        CHECK(p.value > 0.05);
        CHECK(std::abs(p.value - 0.05) > sets.band_tolerance);
    }

    CHECK_THROWS_AS(direx::copula_level_sets(c, 0.0, 101), direx::ConfigInvalidError);
    CHECK_THROWS_AS(direx::copula_level_sets(c, 0.05, 10), direx::ConfigInvalidError);
}

TEST_CASE("rotating a gaussian keeps it gaussian with the frozen parameters") {
    direx::BivariateGaussianSpec g;
    g.first = direx::GaussianParams{5.0, 25.0};
    g.second = direx::GaussianParams{10.0, 1.0};
    g.rho = 0.2;

    // At the diagonal nothing moves.
    const direx::BivariateGaussianSpec same =
        direx::rotated_gaussian_params(g, direx::canonical_diagonal(2));
    CHECK(same.first.mean == doctest::Approx(5.0).epsilon(1e-14));
    CHECK(same.second.variance == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(same.rho == doctest::Approx(0.2).epsilon(1e-14));

    Eigen::VectorXd raw(2);
    raw << 3.0, 4.0;
    const direx::BivariateGaussianSpec turned =
        direx::rotated_gaussian_params(g, direx::DirectionVector::normalized(raw));
    CHECK(turned.first.mean == doctest::Approx(6.3639610306789285).epsilon(1e-12));
    CHECK(turned.second.mean == doctest::Approx(9.192388155425117).epsilon(1e-12));
    CHECK(turned.first.variance == doctest::Approx(24.8).epsilon(1e-12));
    CHECK(turned.second.variance == doctest::Approx(1.2).epsilon(1e-12));
    CHECK(turned.rho == doctest::Approx(-0.43994134506406).epsilon(1e-10));
    CHECK(turned.first.variance + turned.second.variance ==
          doctest::Approx(26.0).epsilon(1e-12));
}

TEST_CASE("rotated gaussian parameters preserve total variance in any direction") {
    direx::BivariateGaussianSpec g;
    g.first = direx::GaussianParams{5.0, 25.0};
    g.second = direx::GaussianParams{10.0, 1.0};
    g.rho = 0.2;
    direx::Rng rng(223);
    for (int trial = 0; trial < 25; ++trial) {
        const direx::DirectionVector u = testsup::random_direction(rng, 2);
        const direx::BivariateGaussianSpec turned = direx::rotated_gaussian_params(g, u);
        CHECK(turned.first.variance + turned.second.variance ==
              doctest::Approx(26.0).epsilon(1e-10));
        CHECK(turned.rho > -1.0);
        CHECK(turned.rho < 1.0);
        CHECK(turned.first.variance > 0.0);
        CHECK(turned.second.variance > 0.0);
    }

    direx::BivariateGaussianSpec bad = g;
    bad.rho = 1.0;
    CHECK_THROWS_AS(direx::rotated_gaussian_params(bad, direx::canonical_diagonal(2)),
                    direx::ConfigInvalidError);
}
