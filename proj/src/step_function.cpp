#include "cdim/step_function.hpp"
#include "cdim/errors.hpp"

#include <algorithm>
#include <cmath>

namespace cdim {

StepFunction::StepFunction(std::vector<double> bp, std::vector<double> v)
    : breakpoints(std::move(bp)), values(std::move(v)) {
    if (values.size() != breakpoints.size() + 1)
        throw domain_error("step function needs one more value than breakpoints");
    for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i)
        if (!(breakpoints[i] < breakpoints[i + 1]))
            throw domain_error("step function breakpoints must be strictly increasing");
    if (!breakpoints.empty() && !(breakpoints.front() > 0.0))
        throw domain_error("step function breakpoints must be positive");
}

double StepFunction::operator()(double x) const {
    // value on (y_i, y_{i+1}]: first breakpoint >= x selects the segment
    auto it = std::lower_bound(breakpoints.begin(), breakpoints.end(), x);
    return values[std::size_t(it - breakpoints.begin())];
}

void StepFunction::compress(double tol) {
    std::vector<double> bp, v;
    v.push_back(values[0]);
    for (std::size_t i = 0; i < breakpoints.size(); ++i) {
        if (std::fabs(values[i + 1] - v.back()) > tol) {
            bp.push_back(breakpoints[i]);
            v.push_back(values[i + 1]);
        }
    }
    breakpoints = std::move(bp);
    values = std::move(v);
}

} // namespace cdim
