#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "cdim/errors.hpp"
#include "cdim/step_function.hpp"

using namespace cdim;

TEST_CASE("left-closed right-closed segment semantics") {
    StepFunction f({1.0, 2.0}, {1.0, 5.0, 9.0});
    CHECK(f(0.5) == 1.0);
    CHECK(f(1.0) == 1.0); // value at a breakpoint belongs to the left segment
    CHECK(f(1.5) == 5.0);
    CHECK(f(2.0) == 5.0);
    CHECK(f(3.0) == 9.0);
    CHECK(f.tail_value() == 9.0);
}

TEST_CASE("constant function") {
    StepFunction f;
    CHECK(f(0.1) == 0.0);
    CHECK(f(1e9) == 0.0);
}

TEST_CASE("compress drops redundant breakpoints") {
    StepFunction f({1.0, 2.0, 3.0}, {1.0, 1.0, 4.0, 4.0});
    f.compress();
    CHECK(f.breakpoints.size() == 1);
    CHECK(f.breakpoints[0] == 2.0);
    CHECK(f(1.5) == 1.0);
    CHECK(f(2.5) == 4.0);
}

TEST_CASE("validation") {
    CHECK_THROWS_AS(StepFunction({2.0, 1.0}, {1.0, 2.0, 3.0}), error);
    CHECK_THROWS_AS(StepFunction({1.0}, {1.0}), error);
}
