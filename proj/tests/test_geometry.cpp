#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "cdim/errors.hpp"
#include "cdim/geometry.hpp"

#include <algorithm>
#include <cmath>

using namespace cdim;

namespace {

SelfSimilarSystem cantor() {
    SelfSimilarSystem sys;
    sys.ambient_dim = 1;
    sys.maps.push_back({Ratio::rational(1, 3), {}, {0.0}});
    sys.maps.push_back({Ratio::rational(1, 3), {}, {2.0 / 3.0}});
    return sys;
}

SelfSimilarSystem sierpinski() {
    SelfSimilarSystem sys;
    sys.ambient_dim = 2;
    sys.maps.push_back({Ratio::rational(1, 2), {}, {0.0, 0.0}});
    sys.maps.push_back({Ratio::rational(1, 2), {}, {0.5, 0.0}});
    sys.maps.push_back({Ratio::rational(1, 2), {}, {0.25, std::sqrt(3.0) / 4.0}});
    return sys;
}

SelfSimilarSystem f1() {
    SelfSimilarSystem sys;
    sys.ambient_dim = 2;
    sys.maps.push_back({Ratio::rational(1, 4), {}, {0.0, 0.0}});
    sys.maps.push_back({Ratio::rational(1, 4), {}, {0.75, 0.0}});
    sys.maps.push_back({Ratio::rational(1, 4), {}, {0.75, 0.75}});
    sys.maps.push_back({Ratio::rational(1, 4), {}, {0.0, 0.75}});
    return sys;
}

bool contains_point(const PointCloud& c, const Vec& p) {
    return std::find(c.points.begin(), c.points.end(), p) != c.points.end();
}

} // namespace

TEST_CASE("apply_word composes maps right to left") {
    auto sys = cantor();
    CHECK(apply_word(sys, {1}, {0.0})[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(apply_word(sys, {}, {0.42})[0] == 0.42);
    CHECK(apply_word(sys, {0, 1}, {0.0})[0] == doctest::Approx(2.0 / 9.0).epsilon(1e-15));
}

TEST_CASE("cantor clouds at small depth") {
    auto sys = cantor();
    auto d0 = attractor_cloud(sys, 0);
    REQUIRE(d0.points.size() == 1);
    CHECK(d0.points[0][0] == 0.0); // fixed point of x/3

    auto d1 = attractor_cloud(sys, 1);
    REQUIRE(d1.points.size() == 2);
    CHECK(d1.points[0][0] == 0.0);
    CHECK(d1.points[1][0] == doctest::Approx(2.0 / 3.0).epsilon(1e-15));

    auto d2 = attractor_cloud(sys, 2);
    REQUIRE(d2.points.size() == 4);
    CHECK(d2.points[1][0] == doctest::Approx(2.0 / 9.0).epsilon(1e-15));
    CHECK(d2.points[3][0] == doctest::Approx(8.0 / 9.0).epsilon(1e-15));

    CHECK(hausdorff_distance(d1, d2) == doctest::Approx(2.0 / 9.0).epsilon(1e-12));
}

TEST_CASE("clouds nest exactly across depths") {
    for (auto sys : {cantor()}) {
        for (int d = 0; d < 5; ++d) {
            auto a = attractor_cloud(sys, d);
            auto b = attractor_cloud(sys, d + 1);
            for (const auto& p : a.points) CHECK(contains_point(b, p));
            CHECK(b.dirt < a.dirt);
        }
    }
    auto sys = sierpinski();
    for (int d = 0; d < 4; ++d) {
        auto a = attractor_cloud(sys, d, SeedMode::all_map_fixed_points);
        auto b = attractor_cloud(sys, d + 1, SeedMode::all_map_fixed_points);
        for (const auto& p : a.points) CHECK(contains_point(b, p));
    }
}

TEST_CASE("dirt bounds the distance to a much deeper cloud") {
    auto sys = cantor();
    auto deep = attractor_cloud(sys, 12);
    for (int d = 1; d <= 5; ++d) {
        auto c = attractor_cloud(sys, d);
        CHECK(hausdorff_distance(c, deep) <= c.dirt);
    }
}

TEST_CASE("hausdorff distance basics") {
    PointCloud a{1, {{0.0}}, 0, 0.0};
    PointCloud b{1, {{1.0}}, 0, 0.0};
    CHECK(hausdorff_distance(a, a) == 0.0);
    CHECK(hausdorff_distance(a, b) == 1.0);
}

TEST_CASE("separation interval of the cantor system") {
    auto sys = cantor();
    auto sep = separation_delta(sys, 4);
    CHECK(sep.separated());
    CHECK(sep.lo <= 1.0 / 3.0);
    CHECK(sep.hi >= 1.0 / 3.0);
    CHECK(sep.hi - sep.lo <= 2.0 * std::pow(1.0 / 3.0, 4) * (1.0 + 1e-9));
}

TEST_CASE("f1 is separated with delta one half") {
    auto sep = separation_delta(f1(), 5, SeedMode::all_map_fixed_points);
    CHECK(sep.separated());
    CHECK(sep.lo <= 0.5);
    CHECK(sep.hi >= 0.5 * (1.0 - 1e-12));
    CHECK(sep.hi - sep.lo < 0.01);
}

TEST_CASE("sierpinski images touch") {
    auto sep = separation_delta(sierpinski(), 6, SeedMode::all_map_fixed_points);
    CHECK(!sep.separated()); // shared vertices give cross distance 0
}

TEST_CASE("validation rejects bad systems") {
    SelfSimilarSystem one;
    one.ambient_dim = 1;
    one.maps.push_back({Ratio::rational(1, 3), {}, {0.0}});
    CHECK_THROWS_AS(one.validate(), error);

    SelfSimilarSystem skew;
    skew.ambient_dim = 2;
    skew.maps.push_back({Ratio::rational(1, 2), {1.0, 0.5, 0.0, 1.0}, {0.0, 0.0}});
    skew.maps.push_back({Ratio::rational(1, 2), {}, {0.5, 0.0}});
    CHECK_THROWS_AS(skew.validate(), error);
}

TEST_CASE("rotation applies before translation") {
    SelfSimilarSystem sys;
    sys.ambient_dim = 2;
    // quarter turn
    sys.maps.push_back({Ratio::rational(1, 2), {0.0, -1.0, 1.0, 0.0}, {1.0, 0.0}});
    sys.maps.push_back({Ratio::rational(1, 2), {}, {0.0, 0.0}});
    sys.validate();
    Vec y = sys.maps[0].apply({1.0, 0.0});
    CHECK(y[0] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(y[1] == doctest::Approx(0.5).epsilon(1e-15));
}
