#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <numbers>
#include <set>
#include <vector>

#include "spatess/geometry.hpp"
#include "spatess/rng.hpp"

using namespace spatess;

namespace {

bool same_points(const PointSet& a, const PointSet& b) {
    if (a.size() != b.size()) return false;
    for (int i = 0; i < a.size(); ++i)
        if (a.pts[i].x != b.pts[i].x || a.pts[i].y != b.pts[i].y) return false;
    return true;
}

} // namespace

TEST_CASE("region basics: area, scale, containment, validation") {
    Region d = Region::disc(2.0);
    CHECK(d.area() == doctest::Approx(4.0 * std::numbers::pi));
    CHECK(d.scale() == doctest::Approx(2.0));
    CHECK(d.contains({1.9, 0.0}));
    CHECK(d.contains({0.0, -2.0}));
    CHECK_FALSE(d.contains({2.1, 0.0}));

    Region r = Region::rect(0.4);
    CHECK(r.area() == doctest::Approx(0.4));
    CHECK(r.scale() == doctest::Approx(std::sqrt(0.4)));
    CHECK(r.contains({0.0, 0.0}));
    CHECK(r.contains({1.0, 0.4}));
    CHECK_FALSE(r.contains({0.5, 0.5}));
    CHECK_FALSE(r.contains({-0.2, 0.1}));

    CHECK_THROWS_AS(Region::disc(0.0), ConfigError);
    CHECK_THROWS_AS(Region::disc(-1.0), ConfigError);
    CHECK_THROWS_AS(Region::rect(0.0), ConfigError);
    CHECK_THROWS_AS(Region::rect(1.5), ConfigError);
}

TEST_CASE("generators are deterministic in the seed") {
    Region d = Region::disc(1.5);
    CHECK(same_points(gen_uniform(d, 40, 7), gen_uniform(d, 40, 7)));
    CHECK_FALSE(same_points(gen_uniform(d, 40, 7), gen_uniform(d, 40, 8)));
    CHECK(same_points(gen_regular(d, 40, 7), gen_regular(d, 40, 7)));
    // regular-disc layouts differ across seeds only by the global rotation
    CHECK_FALSE(same_points(gen_regular(d, 40, 7), gen_regular(d, 40, 8)));

    Region r = Region::rect(0.6);
    CHECK(same_points(gen_uniform(r, 40, 3), gen_uniform(r, 40, 3)));
    // the rect lattice is deterministic regardless of seed
    CHECK(same_points(gen_regular(r, 40, 3), gen_regular(r, 40, 99)));
}

TEST_CASE("generated points stay inside the region") {
    for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
        for (int n : {1, 7, 50, 200}) {
            Region d = Region::disc(2.5);
            for (const auto& p : gen_uniform(d, n, seed).pts) CHECK(d.contains(p));
            for (const auto& p : gen_regular(d, n, seed).pts) CHECK(d.contains(p));
            Region r = Region::rect(0.35);
            for (const auto& p : gen_uniform(r, n, seed).pts) CHECK(r.contains(p));
            for (const auto& p : gen_regular(r, n, seed).pts) CHECK(r.contains(p));
        }
    }
    CHECK_THROWS_AS(gen_uniform(Region::disc(1.0), 0, 1), ConfigError);
    CHECK_THROWS_AS(gen_regular(Region::disc(1.0), 0, 1), ConfigError);
}

TEST_CASE("regular layouts keep points well separated") {
    // rect lattice: min pairwise distance comfortably above 0.75 sqrt(A/n)
    for (double w : {0.1, 0.4, 0.7, 1.0}) {
        for (int n : {10, 13, 20, 37, 64, 150}) {
            auto ps = gen_regular(Region::rect(w), n, 5);
            CHECK(min_pairwise_distance(ps) >= 0.75 * std::sqrt(w / n));
        }
    }
    // disc layout: small-n separation and a uniform lower bound in units of
    // sqrt(area/n)
    CHECK(min_pairwise_distance(gen_regular(Region::disc(1.0), 4, 3)) > 0.7);
    for (int n : {4, 10, 22, 50, 120, 200}) {
        auto ps = gen_regular(Region::disc(1.0), n, 9);
        CHECK(min_pairwise_distance(ps) >= 0.8 * std::sqrt(std::numbers::pi / n));
    }
}

TEST_CASE("regular layouts beat uniform draws on nearest-neighbour spacing") {
    int wins = 0;
    double acc_regular = 0.0, acc_uniform = 0.0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        double a = mean_nn_distance(gen_regular(Region::disc(1.0), 30, seed));
        double b = mean_nn_distance(gen_uniform(Region::disc(1.0), 30, seed));
        acc_regular += a;
        acc_uniform += b;
        if (a > b) ++wins;
    }
    CHECK(wins >= 95);
    CHECK(acc_regular > 1.3 * acc_uniform);
}

TEST_CASE("inhibited subsampling honours delta and close pairs") {
    auto frame = gen_uniform(Region::disc(1.0), 80, 42);

    SUBCASE("explicit delta is respected") {
        auto ps = sample_inhibited(frame, 15, 0.15, 0, 0.0, 7);
        CHECK(ps.size() == 15);
        CHECK(min_pairwise_distance(ps) >= 0.15);
        CHECK(ps.delta == doctest::Approx(0.15));
        CHECK(ps.scheme == Scheme::Inhibited);
        // every selected point comes from the frame
        for (const auto& p : ps.pts) {
            bool found = false;
            for (const auto& q : frame.pts)
                if (p.x == q.x && p.y == q.y) found = true;
            CHECK(found);
        }
    }

    SUBCASE("auto delta maximizes separation and is deterministic") {
        auto a = sample_inhibited(frame, 20, std::nullopt, 0, 0.0, 11);
        auto b = sample_inhibited(frame, 20, std::nullopt, 0, 0.0, 11);
        CHECK(same_points(a, b));
        CHECK(a.delta > 0.0);
        CHECK(min_pairwise_distance(a) >= a.delta);
    }

    SUBCASE("n equal to the frame size returns the whole frame") {
        auto ps = sample_inhibited(frame, frame.size(), std::nullopt, 0, 0.0, 5);
        CHECK(same_points(ps, frame));
    }

    SUBCASE("close pairs sit within eta of the inhibited core") {
        const int n = 18, k = 3;
        const double eta = 0.35;
        auto ps = sample_inhibited(frame, n, 0.12, k, eta, 13);
        CHECK(ps.size() == n);
        CHECK(ps.close_pairs == k);
        // at least n - k points are delta-separated and every point lies
        // within eta of some other selected point or is part of the core;
        // verify the documented guarantee: each of the k extras is within eta
        // of a selected point. Equivalent check: at most k points violate the
        // delta spacing, and each violator has a neighbour within eta.
        int violators = 0;
        for (int i = 0; i < ps.size(); ++i) {
            double nn = 1e9;
            for (int j = 0; j < ps.size(); ++j) {
                if (i == j) continue;
                nn = std::min(nn, std::hypot(ps.pts[i].x - ps.pts[j].x,
                                             ps.pts[i].y - ps.pts[j].y));
            }
            if (nn < 0.12) {
                ++violators;
                CHECK(nn <= eta);
            }
        }
        CHECK(violators <= 2 * k);
    }

    SUBCASE("argument validation") {
        CHECK_THROWS_AS(sample_inhibited(frame, 0, std::nullopt, 0, 0.0, 1), ConfigError);
        CHECK_THROWS_AS(sample_inhibited(frame, 81, std::nullopt, 0, 0.0, 1), ConfigError);
        CHECK_THROWS_AS(sample_inhibited(frame, 10, std::nullopt, 11, 0.1, 1), ConfigError);
        CHECK_THROWS_AS(sample_inhibited(frame, 10, std::nullopt, 2, 0.0, 1), ConfigError);
        CHECK_THROWS_AS(sample_inhibited(frame, 10, -0.5, 0, 0.0, 1), ConfigError);
        // delta far beyond the frame diameter is infeasible
        CHECK_THROWS_AS(sample_inhibited(frame, 40, 5.0, 0, 0.0, 1), InfeasibleError);
    }
}

TEST_CASE("inhibited subsamples carry less pairwise correlation than random ones") {
    int wins = 0;
    double acc_inhibited = 0.0, acc_random = 0.0;
    for (std::uint64_t s = 1; s <= 200; ++s) {
        auto frame = gen_uniform(Region::disc(1.0), 60, 1000 + s);
        auto inhib = sample_inhibited(frame, 20, std::nullopt, 0, 0.0, 2000 + s);
        Rng rng(mix_seed(3000 + s, 5));
        std::vector<int> idx(60);
        for (int i = 0; i < 60; ++i) idx[i] = i;
        rng.shuffle(idx);
        PointSet sub;
        sub.scheme = Scheme::Uniform;
        for (int i = 0; i < 20; ++i) sub.pts.push_back(frame.pts[static_cast<std::size_t>(idx[i])]);
        double fi = pair_sum_f(inhib, Family::Exponential, 0.5);
        double fs = pair_sum_f(sub, Family::Exponential, 0.5);
        acc_inhibited += fi;
        acc_random += fs;
        if (fi < fs) ++wins;
    }
    CHECK(wins >= 180);
    CHECK(acc_inhibited < acc_random);
}

TEST_CASE("distance helpers") {
    PointSet ps;
    ps.pts = {{0.0, 0.0}, {3.0, 4.0}, {3.0, 0.0}};
    auto d = pairwise_distances(ps);
    REQUIRE(d.size() == 9);
    CHECK(d[0 * 3 + 1] == doctest::Approx(5.0));
    CHECK(d[1 * 3 + 0] == doctest::Approx(5.0));
    CHECK(d[0 * 3 + 2] == doctest::Approx(3.0));
    CHECK(d[1 * 3 + 2] == doctest::Approx(4.0));
    CHECK(d[0 * 3 + 0] == 0.0);
    CHECK(d[1 * 3 + 1] == 0.0);
    CHECK(min_pairwise_distance(ps) == doctest::Approx(3.0));
    CHECK(mean_nn_distance(ps) == doctest::Approx((3.0 + 4.0 + 3.0) / 3.0));

    // pair_sum_f counts both orientations
    double expected = 2.0 * (correlation(Family::Exponential, 5.0, 1.0) +
                             correlation(Family::Exponential, 3.0, 1.0) +
                             correlation(Family::Exponential, 4.0, 1.0));
    CHECK(pair_sum_f(ps, Family::Exponential, 1.0) == doctest::Approx(expected).epsilon(1e-12));

    PointSet single;
    single.pts = {{1.0, 1.0}};
    CHECK(min_pairwise_distance(single) == std::numeric_limits<double>::infinity());
    CHECK(pair_sum_f(single, Family::Gaussian, 1.0) == 0.0);
    CHECK_THROWS_AS(mean_nn_distance(single), ComputeError);
}

TEST_CASE("uniform disc draws match the exact mean pairwise distance") {
    // E[d] for two independent uniform points on the unit disc is 128/(45 pi).
    const double target = 128.0 / (45.0 * std::numbers::pi);
    double acc = 0.0;
    int cells = 0;
    for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
        auto ps = gen_uniform(Region::disc(1.0), 4000, seed);
        auto d = pairwise_distances(ps);
        double sum = 0.0;
        long long cnt = 0;
        const int n = ps.size();
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) {
                sum += d[static_cast<std::size_t>(i) * n + j];
                ++cnt;
            }
        acc += sum / static_cast<double>(cnt);
        ++cells;
    }
    CHECK(acc / cells == doctest::Approx(target).epsilon(0.01));
}

TEST_CASE("points CSV round trip") {
    auto ps = gen_uniform(Region::disc(1.0), 25, 99);
    const std::string path = "geometry_roundtrip_test.csv";
    write_points_csv(path, ps);
    auto back = read_points_csv(path);
    CHECK(same_points(ps, back));
    std::remove(path.c_str());

    CHECK_THROWS_AS(read_points_csv("definitely_missing_points.csv"), ConfigError);

    // malformed rows are rejected with the line number
    const std::string bad = "geometry_bad_test.csv";
    {
        FILE* f = std::fopen(bad.c_str(), "w");
        std::fputs("x,y\n0.1,0.2\nnot-a-number,0.3\n", f);
        std::fclose(f);
    }
    CHECK_THROWS_AS(read_points_csv(bad), ConfigError);
    std::remove(bad.c_str());
}

TEST_CASE("shape and parse helpers") {
    CHECK(parse_shape("disc") == Shape::Disc);
    CHECK(parse_shape("Rect") == Shape::Rect);
    CHECK_THROWS_AS(parse_shape("sphere"), ConfigError);
    CHECK(std::string(shape_name(Shape::Disc)) == "disc");
    CHECK(std::string(shape_name(Shape::Rect)) == "rect");
}
