#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "cdim/errors.hpp"
#include "cdim/ratio.hpp"

#include <cmath>

using namespace cdim;

TEST_CASE("decimal parse") {
    Ratio r = Ratio::parse("0.25");
    CHECK(r.kind == Ratio::Kind::real);
    CHECK(r.value == 0.25);
}

TEST_CASE("rational parse reduces") {
    Ratio r = Ratio::parse("1/3");
    CHECK(r.kind == Ratio::Kind::rational);
    CHECK(r.num == 1);
    CHECK(r.den == 3);
    CHECK(r.value == doctest::Approx(1.0 / 3.0).epsilon(1e-16));

    Ratio s = Ratio::parse("2/6");
    CHECK(s.num == 1);
    CHECK(s.den == 3);
}

TEST_CASE("power parse") {
    Ratio r = Ratio::parse("2^-1.6180339887498949");
    CHECK(r.kind == Ratio::Kind::power);
    CHECK(r.base == 2.0);
    CHECK(r.exponent == -1.6180339887498949);
    CHECK(r.value == std::pow(2.0, -1.6180339887498949));

    Ratio s = Ratio::parse("1/2^3");
    CHECK(s.kind == Ratio::Kind::power);
    CHECK(s.value == 0.125);
}

TEST_CASE("values outside (0,1) rejected") {
    CHECK_THROWS_AS(Ratio::parse("1.0"), error);
    CHECK_THROWS_AS(Ratio::parse("0"), error);
    CHECK_THROWS_AS(Ratio::parse("5/3"), error);
    CHECK_THROWS_AS(Ratio::parse("-1/2"), error);
    CHECK_THROWS_AS(Ratio::parse("3^2"), error);
}

TEST_CASE("malformed text rejected") {
    CHECK_THROWS_AS(Ratio::parse("abc"), error);
    CHECK_THROWS_AS(Ratio::parse("1/0"), error);
    CHECK_THROWS_AS(Ratio::parse("0.5x"), error);
    CHECK_THROWS_AS(Ratio::parse(""), error);
}

TEST_CASE("str round trip preserves the value") {
    for (const char* t : {"0.25", "1/3", "2^-1.6180339887498949", "0.37219841289431"}) {
        Ratio r = Ratio::parse(t);
        Ratio back = Ratio::parse(r.str());
        CHECK(back.value == r.value);
        CHECK(back.kind == r.kind);
    }
}
