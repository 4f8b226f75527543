#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "cdim/errors.hpp"
#include "cdim/roots.hpp"

#include <cmath>

using namespace cdim;

namespace {

const double phi = (1.0 + std::sqrt(5.0)) / 2.0;

ScalingVector golden_sv() {
    return {{Ratio::rational(1, 2), Ratio::power(2.0, -phi)}};
}

double den_residual(const std::vector<double>& r, cplx s) {
    cplx acc = 1.0;
    for (double v : r) acc -= std::pow(cplx(v, 0.0), s);
    return std::abs(acc);
}

} // namespace

TEST_CASE("similarity dimension") {
    CHECK(std::fabs(moran_root({1.0 / 3.0, 1.0 / 3.0}) - std::log(2.0) / std::log(3.0)) <= 1e-12);
    CHECK(std::fabs(moran_root({0.5, 0.5, 0.5}) - std::log(3.0) / std::log(2.0)) <= 1e-12);
    CHECK(std::fabs(moran_root({0.5, std::pow(2.0, -phi)}) - 0.7792119034) <= 5e-6);
    CHECK(std::fabs(moran_root({0.5, 0.5}) - 1.0) <= 1e-12);
    // growing any ratio grows the root
    CHECK(moran_root({0.4, 0.4}) < moran_root({0.45, 0.4}));
    CHECK_THROWS_AS(moran_root({1.5, 0.5}), error);
}

TEST_CASE("lattice classification") {
    SUBCASE("equal rationals") {
        auto c = classify_lattice({{Ratio::rational(1, 3), Ratio::rational(1, 3)}});
        auto* lf = std::get_if<LatticeForm>(&c);
        REQUIRE(lf);
        CHECK(lf->base == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
        CHECK(lf->exponents == std::vector<long long>{1, 1});
        CHECK(lf->distinct_exponents == std::vector<long long>{1});
        CHECK(lf->multiplicities == std::vector<long long>{2});
        CHECK(lf->period() == doctest::Approx(2.0 * M_PI / std::log(3.0)).epsilon(1e-14));
    }
    SUBCASE("powers of a half") {
        auto c = classify_lattice({{Ratio::rational(1, 2), Ratio::rational(1, 4)}});
        auto* lf = std::get_if<LatticeForm>(&c);
        REQUIRE(lf);
        CHECK(lf->base == doctest::Approx(0.5).epsilon(1e-15));
        CHECK(lf->exponents == std::vector<long long>{1, 2});
    }
    SUBCASE("golden power form is nonlattice") {
        auto c = classify_lattice(golden_sv(), 100000);
        auto* nv = std::get_if<NonlatticeVerdict>(&c);
        REQUIRE(nv);
        CHECK(nv->defect > nv->tolerance);
        CHECK(nv->q_cap == 100000);
    }
    SUBCASE("half third sixth is nonlattice") {
        auto c = classify_lattice(
            {{Ratio::rational(1, 2), Ratio::rational(1, 3), Ratio::rational(1, 6)}}, 10000);
        CHECK(std::holds_alternative<NonlatticeVerdict>(c));
    }
}

TEST_CASE("lattice root computation") {
    SUBCASE("middle thirds") {
        auto c = classify_lattice({{Ratio::rational(1, 3), Ratio::rational(1, 3)}});
        auto lf = std::get<LatticeForm>(c);
        double D = std::log(2.0) / std::log(3.0);
        double p = 2.0 * M_PI / std::log(3.0);
        auto rs = lattice_roots(lf, {0.0, 1.0, 1.5 * p});
        REQUIRE(rs.roots.size() == 3);
        REQUIRE(rs.generator.has_value());
        int n = -1;
        for (const auto& r : rs.roots) {
            CHECK(std::abs(r.location - cplx(D, n * p)) < 1e-10);
            CHECK(r.multiplicity == 1);
            CHECK(r.residual <= 1e-10);
            CHECK(den_residual({1.0 / 3.0, 1.0 / 3.0}, r.location) <= 1e-10);
            ++n;
        }
    }
    SUBCASE("quarter-scale string form") {
        LatticeForm lf;
        lf.base = 0.25;
        lf.exponents = {1, 1};
        lf.distinct_exponents = {1};
        lf.multiplicities = {2};
        double p = 2.0 * M_PI / std::log(4.0);
        auto rs = lattice_roots(lf, {0.0, 1.0, 2.5 * p});
        REQUIRE(rs.roots.size() == 5);
        for (const auto& r : rs.roots) {
            CHECK(std::fabs(r.location.real() - 0.5) < 1e-12);
            CHECK(std::fabs(std::remainder(r.location.imag(), p)) < 1e-10);
        }
    }
    SUBCASE("four quarter-scale maps") {
        auto c = classify_lattice({{Ratio::rational(1, 4), Ratio::rational(1, 4),
                                    Ratio::rational(1, 4), Ratio::rational(1, 4)}});
        auto lf = std::get<LatticeForm>(c);
        auto rs = lattice_roots(lf, {0.0, 1.5, 10.0});
        double p = 2.0 * M_PI / std::log(4.0);
        REQUIRE(!rs.roots.empty());
        for (const auto& r : rs.roots) {
            CHECK(std::fabs(r.location.real() - 1.0) < 1e-12);
            CHECK(std::fabs(std::remainder(r.location.imag(), p)) < 1e-10);
        }
    }
}

TEST_CASE("nonlattice root search") {
    std::vector<double> r{0.5, std::pow(2.0, -phi)};
    double D = moran_root(r);
    SUBCASE("real window around the dimension") {
        auto rs = nonlattice_roots(r, {0.0, 0.8, 20.0});
        REQUIRE(!rs.roots.empty());
        int on_line = 0;
        for (const auto& root : rs.roots) {
            CHECK(root.residual <= 1e-10);
            CHECK(den_residual(r, root.location) <= 1e-10);
            if (std::fabs(root.location.real() - D) <= 1e-8) ++on_line;
            CHECK(root.location.real() <= D + 1e-8);
        }
        CHECK(on_line == 1);
        // the count matches the raw argument-principle count
        int total = 0;
        for (const auto& root : rs.roots) total += root.multiplicity;
        CHECK(total == winding_count(r, {0.0, 0.8, 20.0}));
    }
    SUBCASE("window right of the dimension is empty") {
        auto rs = nonlattice_roots(r, {D + 0.05, D + 0.5, 20.0}, false);
        CHECK(rs.roots.empty());
    }
}

TEST_CASE("diophantine approximation ladder") {
    SUBCASE("first two golden approximants") {
        auto s2 = diophantine_sequence(golden_sv(), 2);
        CHECK_FALSE(s2.already_lattice);
        CHECK(s2.q == 1);
        auto v2 = s2.ratios.values();
        REQUIRE(v2.size() == 2);
        CHECK(v2[0] == doctest::Approx(0.5).epsilon(1e-14));
        CHECK(v2[1] == doctest::Approx(0.25).epsilon(1e-14));

        auto s3 = diophantine_sequence(golden_sv(), 3);
        CHECK(s3.q == 2);
        auto v3 = s3.ratios.values();
        CHECK(v3[1] == doctest::Approx(std::pow(2.0, -1.5)).epsilon(1e-14));
        CHECK(s3.defect < s2.defect);
    }
    SUBCASE("lattice input passes through") {
        auto s = diophantine_sequence({{Ratio::rational(1, 2), Ratio::rational(1, 4)}}, 4);
        CHECK(s.already_lattice);
        CHECK(s.ratios.values() == std::vector<double>{0.5, 0.25});
    }
}

TEST_CASE("approximant systems and root matching") {
    SelfSimilarSystem sys;
    sys.ambient_dim = 1;
    sys.maps.push_back({Ratio::rational(1, 2), {}, {0.5}});
    sys.maps.push_back({Ratio::power(2.0, -phi), {}, {0.0}});
    auto a2 = approximate_system(sys, 2);
    CHECK(a2.maps[0].translation == Vec{0.5});
    CHECK(a2.maps[1].ratio.value == doctest::Approx(0.25).epsilon(1e-14));

    std::vector<double> exact{0.5, std::pow(2.0, -phi)};
    double D = moran_root(exact);
    Window w{0.0, D + 0.2, 15.0};
    auto truth = nonlattice_roots(exact, w);

    CHECK(root_match(truth, truth, 15.0).max_dist == 0.0);

    double prev = 1e9;
    for (int M : {2, 3, 5}) {
        auto step = diophantine_sequence(golden_sv(), M);
        // keep the negative-Re root lines of the approximants so that every
        // exact root has a counterpart to converge to
        auto approx = lattice_roots(step.form, {-1.0, 1.0, 15.0});
        auto rep = root_match(truth, approx, 15.0);
        CHECK(rep.matched > 0);
        CHECK(rep.max_dist < prev);
        prev = rep.max_dist;
    }
}

TEST_CASE("csv rendering") {
    auto c = classify_lattice({{Ratio::rational(1, 3), Ratio::rational(1, 3)}});
    auto rs = lattice_roots(std::get<LatticeForm>(c), {0.0, 1.0, 8.0});
    auto csv = roots_csv(rs);
    CHECK(csv.rfind("re,im,multiplicity,residual", 0) == 0);
    CHECK(csv.find("0.630929753571457") != std::string::npos);
}
