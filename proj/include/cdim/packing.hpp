#pragma once
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cdim/geometry.hpp"
#include "cdim/step_function.hpp"

namespace cdim {

// Largest number of pairwise disjoint closed balls of this radius centered at
// the given points. Disjoint means center distance > 2*radius; a relative
// slack of 1e-12 treats borderline pairs as overlapping so that the count
// never exceeds the true packing number. Exact: 1d inputs use a greedy sweep
// (optimal on a line), higher dimensions solve a maximum independent set by
// branch and bound. Instances past `cap` points raise a capacity error that
// suggests greedy_packing.
int max_packing(const std::vector<Vec>& pts, double radius, std::size_t cap = 5000);

// First-fit packing in lexicographic point order: fast lower bound,
// always <= max_packing.
int greedy_packing(const std::vector<Vec>& pts, double radius);

struct ProfileSample {
    double x = 0.0;
    long long lo = 0, hi = 0;
    bool resolved = false; // lo == hi and the dirt radius stayed positive
};

struct BoxProfile {
    StepFunction lo_profile; // step function through the lo counts
    std::vector<ProfileSample> samples;
    double dirt = 0.0;
    int depth = 0;
};

// Bracket of the box-counting function at each grid x:
//   lo = max_packing(cloud, 1/x), hi = max_packing(cloud, 1/x - dirt(1+1e-9)).
BoxProfile box_profile(const SelfSimilarSystem& sys, int depth, const std::vector<double>& x_grid,
                       SeedMode seed = SeedMode::all_map_fixed_points,
                       std::size_t point_cap = 1000000, std::size_t mis_cap = 5000);

// Locate a jump of the box-counting function inside (x_left, x_right) by
// bisecting on resolved bracket values. Returns the midpoint of the final
// interval, or nothing if brackets fail to collapse along the way.
std::optional<double> refine_jump(const SelfSimilarSystem& sys, const PointCloud& cloud,
                                  double x_left, double x_right, double rel_tol = 1e-12,
                                  std::size_t mis_cap = 5000);

// N(x) = sum_j N(r_j x) for x > delta^{-1}, values from `base` below.
// base_valid_to must reach delta^{-1} or the base table is incomplete.
long long renewal_box_count(const std::vector<double>& ratios, double delta,
                            const StepFunction& base, double base_valid_to, double x);

// L(x) = N(x) - sum_j N(r_j x) from an exact profile of N on (0, valid_to].
// The result is valid on (0, valid_to] with the last segment extended as the
// tail value. When delta is given the delta-disjoint shape facts are checked:
// integer values in [1-N, 0], nondecreasing, vanishing past delta^{-1}.
StepFunction lalley_L(const std::vector<double>& ratios, const StepFunction& profile,
                      double valid_to, std::optional<double> delta = std::nullopt);

// Exact box-counting profile of a solid interval of the given length:
// floor(len*x/2) + 1 with jumps at x = 2n/len, tabulated up to xmax.
StepFunction interval_box_profile(double length, double xmax);

std::string profile_csv(const BoxProfile& p);

} // namespace cdim
