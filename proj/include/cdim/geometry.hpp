#pragma once
#include <cstddef>
#include <vector>

#include "cdim/ratio.hpp"

namespace cdim {

using Vec = std::vector<double>;

// phi(x) = ratio * rotation * x + translation. rotation is row-major m x m
// and must be orthonormal to within 1e-12.
struct Similarity {
    Ratio ratio;
    std::vector<double> rotation; // empty means identity
    Vec translation;

    Vec apply(const Vec& x) const;
};

struct SelfSimilarSystem {
    int ambient_dim = 1;
    std::vector<Similarity> maps;

    std::vector<double> ratios() const;
    double ratio_max() const;
    // Fixed point of maps[j], from solving (I - r Q) p = t.
    Vec fixed_point(std::size_t j) const;
    // Throws on: fewer than 2 maps, ratio outside (0,1), non-orthonormal
    // rotation, dimension mismatches.
    void validate() const;
};

struct PointCloud {
    int ambient_dim = 1;
    std::vector<Vec> points; // sorted lexicographically, deduplicated
    int depth = 0;
    double dirt = 0.0; // upper bound on the Hausdorff distance to the attractor
};

// Which points seed the iteration. Either choice keeps the clouds exactly
// nested across depths because every seed is fixed by one of the maps.
enum class SeedMode {
    first_map_fixed_point, // just the fixed point of maps[0]
    all_map_fixed_points,  // fixed points of every map (tighter dirt)
};

// Word entries are 0-based map indices, applied left to right:
// apply_word({i,j}, x) = phi_i(phi_j(x)).
Vec apply_word(const SelfSimilarSystem& sys, const std::vector<int>& word, const Vec& x);

PointCloud attractor_cloud(const SelfSimilarSystem& sys, int depth,
                           SeedMode seed = SeedMode::first_map_fixed_point,
                           std::size_t point_cap = 1000000);

double hausdorff_distance(const PointCloud& a, const PointCloud& b);

struct SeparationInterval {
    double lo = 0.0; // clipped at 0
    double hi = 0.0;
    bool separated() const { return hi > 0.0; }
};

// Interval bracketing the largest delta for which the map images are
// delta-disjoint. lo == 0 leaves separation undecided at this depth.
SeparationInterval separation_delta(const SelfSimilarSystem& sys, int depth,
                                    SeedMode seed = SeedMode::first_map_fixed_point);

double euclidean(const Vec& a, const Vec& b);

} // namespace cdim
