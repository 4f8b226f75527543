#pragma once
#include <cstddef>
#include <vector>

namespace cdim {

// Piecewise-constant function on (0, infinity). With breakpoints y_1 < ... < y_n
// the value is values[0] on (0, y_1], values[i] on (y_i, y_{i+1}], and
// values[n] on (y_n, infinity). No breakpoints means a constant function.
struct StepFunction {
    std::vector<double> breakpoints;
    std::vector<double> values; // size breakpoints.size() + 1

    StepFunction() : values{0.0} {}
    StepFunction(std::vector<double> bp, std::vector<double> v);

    double operator()(double x) const;
    double tail_value() const { return values.back(); }

    // Drop breakpoints whose two sides carry the same value.
    void compress(double tol = 0.0);
};

} // namespace cdim
