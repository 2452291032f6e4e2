#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "spatess/ess.hpp"
#include "spatess/rng.hpp"

using namespace spatess;

namespace {

ClusterConfig random_cluster(std::uint64_t seed) {
    Rng rng(mix_seed(seed, 77));
    ClusterConfig c;
    int fam = static_cast<int>(rng.uniform_int(0, 2));
    c.family = fam == 0 ? Family::Gaussian : (fam == 1 ? Family::Exponential : Family::KBessel);
    c.r = rng.uniform(0.05, 2.0);
    c.rho = rng.uniform();
    int n = static_cast<int>(rng.uniform_int(1, 30));
    c.points = gen_uniform(Region::disc(rng.uniform(0.3, 2.0)), n, mix_seed(seed, 78));
    return c;
}

} // namespace

TEST_CASE("cluster_ess agrees with the matrix form to 1e-10") {
    for (std::uint64_t seed = 1; seed <= 300; ++seed) {
        ClusterConfig c = random_cluster(seed);
        double direct = cluster_ess(c).n_star;
        double matrix = ess_exact(cluster_sigma(c), c.points.size());
        CHECK(std::abs(direct - matrix) <= 1e-10 * std::max(1.0, matrix));
    }
}

TEST_CASE("design_ess is the sum of per-cluster matrix values") {
    for (std::uint64_t seed = 500; seed <= 540; ++seed) {
        std::vector<ClusterConfig> design;
        Rng rng(mix_seed(seed, 3));
        int J = static_cast<int>(rng.uniform_int(2, 6));
        double oracle = 0.0;
        for (int j = 0; j < J; ++j) {
            design.push_back(random_cluster(seed * 100 + static_cast<std::uint64_t>(j)));
            oracle += ess_exact(cluster_sigma(design.back()), design.back().points.size());
        }
        CHECK(std::abs(design_ess(design) - oracle) <= 1e-10 * std::max(1.0, oracle));
    }
}

TEST_CASE("per-block design ESS differs from the pooled unweighted formula") {
    // Two independent clusters: a singleton (ESS 1) and a fully correlated
    // pair (ESS 1). The per-block design value is 2. Feeding the pooled
    // block-diagonal matrix through the single-sample formula instead gives
    // 3/5*3 = 1.8, because the unweighted mean over-weights the correlated
    // block. The design value is the per-block sum, not the pooled number.
    ClusterConfig lone;
    lone.points.pts = {{0.0, 0.0}};
    lone.rho = 1.0;

    ClusterConfig pair;
    pair.points.pts = {{0.0, 0.0}, {0.0, 0.0}};
    pair.rho = 1.0;
    pair.family = Family::Exponential;
    pair.r = 1.0;

    CHECK(design_ess({lone, pair}) == doctest::Approx(2.0).epsilon(1e-12));

    std::vector<double> pooled = {
        1.0, 0.0, 0.0,  //
        0.0, 1.0, 1.0,  //
        0.0, 1.0, 1.0,
    };
    CHECK(ess_exact(pooled, 3) == doctest::Approx(1.8).epsilon(1e-12));
}

TEST_CASE("worked approximation values") {
    CHECK(ess_approx(1, 20.0, 0.3, 0.150) == doctest::Approx(10.7816711590).epsilon(1e-9));
    CHECK(ess_approx(2, 10.0, 0.3, 0.138) == doctest::Approx(14.5708873670).epsilon(1e-9));
}

TEST_CASE("compound-symmetry form") {
    CHECK(ess_compound(1, 20, 0.0414) == doctest::Approx(20.0 / (1.0 + 19 * 0.0414)).epsilon(1e-15));
    CHECK(ess_compound(4, 10, 0.0) == doctest::Approx(40.0));
    CHECK(ess_compound(4, 10, 1.0) == doctest::Approx(4.0));
    // matches ess_approx at integer n and s_tilde = 1
    CHECK(ess_compound(3, 12, 0.25) == doctest::Approx(ess_approx(3, 12.0, 0.25, 1.0)).epsilon(1e-15));
    CHECK_THROWS_AS(ess_compound(0, 10, 0.1), ConfigError);
    CHECK_THROWS_AS(ess_compound(1, 10, 1.5), ConfigError);
}

TEST_CASE("range limits bracket the cluster ESS") {
    ClusterConfig c;
    c.points = gen_uniform(Region::disc(1.0), 25, 4);
    c.family = Family::Gaussian;
    c.rho = 0.6;
    const int n = c.points.size();

    // r -> 0: correlation vanishes, every point counts fully
    c.r = 1e-9;
    CHECK(cluster_ess(c).n_star == doctest::Approx(static_cast<double>(n)).epsilon(1e-9));

    // r -> infinity: all pairs fully correlated, compound-symmetry limit
    c.r = 1e9;
    CHECK(cluster_ess(c).n_star ==
          doctest::Approx(n / (1.0 + c.rho * (n - 1))).epsilon(1e-6));

    // bounds for generic rho
    for (double rho : {0.0, 0.3, 0.7, 1.0}) {
        c.rho = rho;
        c.r = 0.8;
        double v = cluster_ess(c).n_star;
        CHECK(v >= 1.0 - 1e-12);
        CHECK(v <= n + 1e-12);
    }
}

TEST_CASE("rho scales the reported spatial ICC") {
    ClusterConfig c;
    c.points = gen_uniform(Region::disc(1.0), 15, 8);
    c.family = Family::Exponential;
    c.r = 0.5;
    c.rho = 0.4;
    EssResult res = cluster_ess(c);
    CHECK(res.n == 15);
    CHECK(res.icc_sp == doctest::Approx(res.s_bar * 0.4).epsilon(1e-15));
    CHECK(res.s_bar > 0.0);
    CHECK(res.s_bar < 1.0);

    // singleton cluster: no pairs, full information
    ClusterConfig solo;
    solo.points.pts = {{0.2, -0.1}};
    EssResult rs = cluster_ess(solo);
    CHECK(rs.n_star == 1.0);
    CHECK(rs.s_bar == 0.0);
}

TEST_CASE("input validation") {
    ClusterConfig c;
    c.points = gen_uniform(Region::disc(1.0), 5, 1);
    c.rho = 1.5;
    CHECK_THROWS_AS(cluster_ess(c), ConfigError);
    c.rho = -0.1;
    CHECK_THROWS_AS(cluster_ess(c), ConfigError);

    ClusterConfig empty;
    CHECK_THROWS_AS(cluster_ess(empty), ComputeError);
    CHECK_THROWS_AS(design_ess({}), ComputeError);

    CHECK_THROWS_AS(ess_exact({1.0, 0.0}, 2), ComputeError);        // wrong size
    CHECK_THROWS_AS(ess_exact({1.0, 0.5, 0.1, 1.0}, 2), ComputeError);  // asymmetric
    CHECK_THROWS_AS(ess_approx(0, 10.0, 0.5, 0.5), ConfigError);
    CHECK_THROWS_AS(ess_approx(1, 0.5, 0.5, 0.5), ConfigError);
    CHECK_THROWS_AS(ess_approx(1, 10.0, -0.1, 0.5), ConfigError);
    CHECK_THROWS_AS(ess_approx(1, 10.0, 0.5, 1.5), ConfigError);
}

TEST_CASE("fractional n interpolates the approximation") {
    // n = m p enters the closed form as a real number
    double lo = ess_approx(5, 12.0, 0.5, 0.2);
    double mid = ess_approx(5, 12.5, 0.5, 0.2);
    double hi = ess_approx(5, 13.0, 0.5, 0.2);
    CHECK(mid > lo);
    CHECK(mid < hi);
}
