#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "cdim/errors.hpp"
#include "cdim/packing.hpp"
#include "cdim/strings.hpp"
#include "cdim/zeta.hpp"

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

RationalZeta cantor_zeta() { return self_similar_zeta(gaps_of(cantor())); }

// residue by averaging z(w + eps e^{it}) * eps e^{it} over a small circle
cplx contour_residue(const RationalZeta& z, cplx w, double eps = 1e-3, int n = 720) {
    cplx acc = 0.0;
    for (int k = 0; k < n; ++k) {
        double t = 2.0 * M_PI * (k + 0.5) / n;
        cplx e = eps * std::exp(cplx(0.0, t));
        acc += z.eval_unchecked(w + e) * e;
    }
    return acc / double(n);
}

} // namespace

TEST_CASE("middle-thirds zeta closed form") {
    auto z = cantor_zeta();
    REQUIRE(z.numerator.size() == 1);
    CHECK(z.numerator[0].coeff == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(z.numerator[0].scale == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
    REQUIRE(z.ratios.size() == 2);
    CHECK(z.ratios[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
    CHECK(std::abs(zeta_eval(z, 1.0) - 1.0) < 1e-12);
    CHECK(std::abs(zeta_eval(z, 2.0) - 1.0 / 7.0) < 1e-14);
}

TEST_CASE("series evaluation matches the closed form") {
    // same length data as the middle-thirds string, generated lattice-style
    // (the word-enumeration generator is exponential in the term count)
    auto s = geometric_string(1.0 / 3.0, 1.0 / 3.0, 1, 2);
    auto v0 = truncated_series(s, 1.0, 0);
    CHECK(std::abs(v0.value) == 0.0);
    auto v1 = truncated_series(s, 1.0, 60);
    CHECK(v1.trusted);
    CHECK(std::abs(v1.value - 1.0) < 1e-8);
    CHECK(std::abs(v1.value - 1.0) <= v1.tail_bound + 1e-15);
    auto v2 = truncated_series(s, 2.0, 30);
    CHECK(std::abs(v2.value - 1.0 / 7.0) < 1e-10);
    // below the dimension the series diverges and must not be trusted
    auto bad = truncated_series(s, 0.5, 30);
    CHECK_FALSE(bad.trusted);

    // the word-enumeration generator agrees on a short prefix
    auto w = self_similar_string(gaps_of(cantor()));
    auto vw = truncated_series(w, 2.0, 12);
    auto vg = truncated_series(s, 2.0, 12);
    CHECK(std::abs(vw.value - vg.value) < 1e-12);
}

TEST_CASE("residues of the middle-thirds zeta") {
    auto z = cantor_zeta();
    double D = std::log(2.0) / std::log(3.0);
    double p = 2.0 * M_PI / std::log(3.0);
    double expect = 1.0 / (2.0 * std::log(3.0));
    auto r0 = residue_simple(z, D);
    CHECK_FALSE(r0.removable);
    CHECK(std::abs(r0.value - expect) < 1e-10);
    auto r1 = residue_simple(z, cplx(D, p));
    CHECK(std::abs(r1.value - expect) < 1e-10);
    // independent check via a contour average
    CHECK(std::abs(contour_residue(z, D) - expect) < 1e-6);
    CHECK(std::abs(contour_residue(z, cplx(D, p)) - expect) < 1e-6);
}

TEST_CASE("pole guard") {
    auto z = cantor_zeta();
    double D = std::log(2.0) / std::log(3.0);
    CHECK_THROWS_AS(zeta_eval(z, cplx(D, 0.0)), error);
    CHECK_NOTHROW(zeta_eval(z, cplx(D + 0.01, 0.0)));
}

TEST_CASE("conjugate symmetry") {
    auto z = cantor_zeta();
    for (cplx s : {cplx(0.8, 3.7), cplx(1.4, -11.0), cplx(0.2, 25.0)}) {
        CHECK(std::abs(zeta_eval(z, std::conj(s)) - std::conj(zeta_eval(z, s))) < 1e-12);
    }
}

TEST_CASE("delta-disjoint box zeta coefficients") {
    SUBCASE("four quarter-scale planar maps") {
        double s2 = std::sqrt(2.0), s17 = std::sqrt(17.0);
        StepFunction L({s2, 8.0 / s17, 2.0}, {-3.0, -2.0, -1.0, 0.0});
        auto z = delta_disjoint_box_zeta({0.25, 0.25, 0.25, 0.25}, s2, 0.5, L);
        // x1^{-s} piece is entire; numerator carries the jump scales of x1^{-s}L
        REQUIRE(z.entire.size() == 1);
        CHECK(z.entire[0].coeff == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(z.entire[0].scale == doctest::Approx(1.0 / s2).epsilon(1e-15));
        REQUIRE(z.numerator.size() == 3);
        double sc[3] = {1.0 / s2, s17 / 8.0, 0.5};
        for (int i = 0; i < 3; ++i) {
            CHECK(z.numerator[i].coeff == doctest::Approx(1.0).epsilon(1e-15));
            CHECK(z.numerator[i].scale == doctest::Approx(sc[i]).epsilon(1e-15));
        }
        REQUIRE(z.ratios.size() == 4);
    }
    SUBCASE("middle thirds degenerates to the geometric string") {
        // N jumps once at x = 2 and the renewal error vanishes immediately
        StepFunction L({2.0}, {-1.0, 0.0});
        auto z = delta_disjoint_box_zeta({1.0 / 3.0, 1.0 / 3.0}, 2.0, 1.0 / 3.0, L);
        CHECK(std::abs(z.entire_at(1.5) - std::pow(0.5, 1.5)) < 1e-14);
        // numerator reduces to (N-1) x1^{-s} = (1/2)^s
        CHECK(std::abs(z.numerator_at(1.5) - std::pow(0.5, 1.5)) < 1e-14);

        // the full zeta agrees with the series of the box-counting string
        // (its first multiplicity already carries the leading x1^{-s} unit)
        std::vector<double> bp, vals{1.0};
        for (int n = 0; n < 30; ++n) {
            bp.push_back(2.0 * std::pow(3.0, n));
            vals.push_back(std::pow(2.0, n + 1));
        }
        auto bs = box_string(StepFunction(bp, vals), bp.back());
        for (cplx s : {cplx(1.2, 0.0), cplx(1.5, 4.0)}) {
            auto series = truncated_series(bs, s, 30);
            CHECK(std::abs(zeta_eval(z, s) - series.value) < 1e-6);
        }
    }
    SUBCASE("non-vanishing error term rejected") {
        StepFunction L({2.0, 4.0}, {-2.0, 0.0, -3.0});
        CHECK_THROWS_AS(delta_disjoint_box_zeta({0.5, 0.5, 0.5}, 2.0, 0.5, L), error);
    }
}

TEST_CASE("open-set-condition box zeta") {
    SUBCASE("sierpinski") {
        StepFunction L({2.0, 4.0}, {-2.0, 0.0, -3.0});
        auto ev = osc_box_zeta({0.5, 0.5, 0.5}, 2.0, L);
        // (1/2)^s + (2 (1/2)^s - 3 (1/4)^s) / (1 - 3 2^{-s})
        for (cplx s : {cplx(1.9, 0.0), cplx(2.3, 5.0)}) {
            cplx h = std::pow(cplx(0.5, 0.0), s), q = std::pow(cplx(0.25, 0.0), s);
            cplx expect = h + (2.0 * h - 3.0 * q) / (1.0 - 3.0 * h);
            CHECK(std::abs(ev.eval(s) - expect) < 1e-12);
        }
        // numerator value at the complex dimensions
        double D = std::log(3.0) / std::log(2.0);
        double p = 2.0 * M_PI / std::log(2.0);
        for (int n : {0, 1, -3}) {
            cplx w(D, p * n);
            CHECK(std::abs(ev.closed.numerator_at(w) - cplx(1.0 / 3.0, 0.0)) < 1e-12);
        }
        // the -3 tail never vanishes, so the validity abscissa is empirical
        CHECK(ev.sigma0_heuristic);
        CHECK(ev.sigma0 == 0.0);
    }
    SUBCASE("zero error term") {
        StepFunction L; // identically 0
        auto ev = osc_box_zeta({0.5, 0.5}, 2.0, L);
        cplx s(1.5, 0.0);
        cplx h = std::pow(cplx(0.5, 0.0), s);
        CHECK(std::abs(ev.eval(s) - (h + h / (1.0 - 2.0 * h))) < 1e-13);
        CHECK_FALSE(ev.sigma0_heuristic);
    }
    SUBCASE("trailing mean marks sigma0 heuristic") {
        StepFunction L({1.0, 3.0, 5.0, 6.0, 9.0}, {-1.0, 0.0, -1.0, 0.0, -1.0, 0.0});
        auto ev = osc_box_zeta({0.5, 0.5}, 2.0, L, TailPolicy::trailing_mean);
        CHECK(ev.sigma0_heuristic);
    }
}

TEST_CASE("geometric string zeta values") {
    // lengths 4^{-n} with multiplicities 2^{n-1}: zeta(s) = 4^{-s}/(1 - 2 4^{-s})
    RationalZeta z;
    z.numerator = {{1.0, 0.25, 1, 4}};
    z.ratios = {0.25, 0.25};
    CHECK(std::abs(zeta_eval(z, 1.0) - 0.5) < 1e-14);
    auto s = geometric_string(0.25, 0.25, 1, 2);
    auto v = truncated_series(s, 1.0, 40);
    CHECK(std::abs(v.value - 0.5) < 1e-12);
}

TEST_CASE("json rendering") {
    auto z = cantor_zeta();
    auto j = zeta_json(z);
    CHECK(j.find("numerator") != std::string::npos);
    CHECK(j.find("ratios") != std::string::npos);
}
