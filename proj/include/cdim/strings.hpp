#pragma once
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cdim/geometry.hpp"
#include "cdim/step_function.hpp"

namespace cdim {

// A fractal string: distinct lengths in strictly decreasing order with
// integer multiplicities. Optionally backed by a generator that can extend
// the list on demand; materialization is capped at 10^7 terms.
struct FractalString {
    std::vector<double> lengths;
    std::vector<long long> multiplicities;
    double materialized_down_to = 0.0; // every term with length >= this is present

    // extend(min_length): append all terms with length >= min_length that are
    // not materialized yet, keeping the decreasing order.
    std::function<void(FractalString&, double)> generator;

    void validate() const;
    // Make sure every term with length >= min_length is materialized.
    void ensure_down_to(double min_length);
    long long total_terms() const;
};

// Geometric counting function N(x) = sum of multiplicities over 1/l_n <= x.
long long string_counting(FractalString& s, double x);

// Normalized gaps of a one-dimensional system whose images leave gaps:
// requires sum r_j < 1 and pairwise non-overlapping images.
struct StringGaps {
    double total_length = 1.0;          // length of the convex hull of the attractor
    std::vector<double> gaps;            // normalized gap lengths g_k, ascending
    std::vector<double> ratios;          // the contraction ratios
    std::vector<Ratio> ratio_forms;      // exact forms when available
};

StringGaps gaps_of(const SelfSimilarSystem& sys);

// Hull length when the 1D attractor is a solid interval (map images tile
// the hull edge to edge), nothing otherwise.
std::optional<double> interval_attractor_length(const SelfSimilarSystem& sys);

// Self-similar string for the gap data: lengths L * g_k * r_w over all words w.
FractalString self_similar_string(const StringGaps& gaps, std::size_t term_cap = 10000000);

// Lattice-geometric string: lengths l1 * ratio^(n-1) with multiplicities
// m1 * growth^(n-1), n = 1, 2, ...
FractalString geometric_string(double l1, double ratio, long long m1, long long growth,
                               std::size_t term_cap = 10000000);

// Box-counting string read off an exact box-counting profile valid on
// (0, valid_to]: lengths are reciprocal jump locations, the first
// multiplicity is the value after the first jump, later ones are the jump
// sizes.
FractalString box_string(const StepFunction& profile, double valid_to);

struct RegressionReport {
    double slope = 0.0;
    double intercept = 0.0;
    double residual_band = 0.0; // max |log N - fit|
};

// Least-squares slope of log N against log x. Needs >= 8 samples spanning
// >= 3 decades.
RegressionReport dimension_regress(const std::vector<std::pair<double, double>>& samples);

struct ContentBounds {
    double lower = 0.0, upper = 0.0;
};

// min and max of N(x)/x^D over the trailing `window_decades` of the samples.
ContentBounds content_bounds(const std::vector<std::pair<double, double>>& samples, double D,
                             double window_decades = 1.0);

std::string string_csv(const FractalString& s);

} // namespace cdim
