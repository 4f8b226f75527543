#include "cdim/geometry.hpp"
#include "cdim/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cdim {

double euclidean(const Vec& a, const Vec& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double d = a[i] - b[i];
        s += d * d;
    }
    return std::sqrt(s);
}

Vec Similarity::apply(const Vec& x) const {
    const std::size_t m = x.size();
    Vec y(m, 0.0);
    if (rotation.empty()) {
        for (std::size_t i = 0; i < m; ++i) y[i] = ratio.value * x[i] + translation[i];
    } else {
        for (std::size_t i = 0; i < m; ++i) {
            double acc = 0.0;
            for (std::size_t j = 0; j < m; ++j) acc += rotation[i * m + j] * x[j];
            y[i] = ratio.value * acc + translation[i];
        }
    }
    return y;
}

std::vector<double> SelfSimilarSystem::ratios() const {
    std::vector<double> r;
    r.reserve(maps.size());
    for (const auto& f : maps) r.push_back(f.ratio.value);
    return r;
}

double SelfSimilarSystem::ratio_max() const {
    double m = 0.0;
    for (const auto& f : maps) m = std::max(m, f.ratio.value);
    return m;
}

void SelfSimilarSystem::validate() const {
    if (ambient_dim < 1) throw parse_error("ambient dimension must be at least 1");
    if (maps.size() < 2) throw parse_error("a system needs at least 2 maps");
    const std::size_t m = std::size_t(ambient_dim);
    for (std::size_t k = 0; k < maps.size(); ++k) {
        const auto& f = maps[k];
        if (!(f.ratio.value > 0.0 && f.ratio.value < 1.0))
            throw parse_error("map " + std::to_string(k) + ": ratio outside (0,1)");
        if (f.translation.size() != m)
            throw parse_error("map " + std::to_string(k) + ": translation has wrong dimension");
        if (!f.rotation.empty()) {
            if (f.rotation.size() != m * m)
                throw parse_error("map " + std::to_string(k) + ": rotation has wrong shape");
            // Q^T Q must be the identity to within 1e-12.
            for (std::size_t i = 0; i < m; ++i) {
                for (std::size_t j = 0; j < m; ++j) {
                    double acc = 0.0;
                    for (std::size_t l = 0; l < m; ++l)
                        acc += f.rotation[l * m + i] * f.rotation[l * m + j];
                    double want = (i == j) ? 1.0 : 0.0;
                    if (std::fabs(acc - want) > 1e-12)
                        throw parse_error("map " + std::to_string(k) + ": rotation is not orthonormal");
                }
            }
        }
    }
}

Vec SelfSimilarSystem::fixed_point(std::size_t j) const {
    const std::size_t m = std::size_t(ambient_dim);
    const auto& f = maps.at(j);
    // Solve (I - r Q) p = t by Gaussian elimination with partial pivoting.
    std::vector<double> a(m * m, 0.0);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t k = 0; k < m; ++k) {
            double q = f.rotation.empty() ? (i == k ? 1.0 : 0.0) : f.rotation[i * m + k];
            a[i * m + k] = (i == k ? 1.0 : 0.0) - f.ratio.value * q;
        }
    Vec b = f.translation;
    for (std::size_t col = 0; col < m; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < m; ++r)
            if (std::fabs(a[r * m + col]) > std::fabs(a[piv * m + col])) piv = r;
        if (piv != col) {
            for (std::size_t k = 0; k < m; ++k) std::swap(a[col * m + k], a[piv * m + k]);
            std::swap(b[col], b[piv]);
        }
        double d = a[col * m + col];
        for (std::size_t r = col + 1; r < m; ++r) {
            double fac = a[r * m + col] / d;
            for (std::size_t k = col; k < m; ++k) a[r * m + k] -= fac * a[col * m + k];
            b[r] -= fac * b[col];
        }
    }
    Vec p(m, 0.0);
    for (std::size_t i = m; i-- > 0;) {
        double acc = b[i];
        for (std::size_t k = i + 1; k < m; ++k) acc -= a[i * m + k] * p[k];
        p[i] = acc / a[i * m + i];
    }
    return p;
}

Vec apply_word(const SelfSimilarSystem& sys, const std::vector<int>& word, const Vec& x) {
    Vec y = x;
    for (std::size_t i = word.size(); i-- > 0;) {
        int j = word[i];
        if (j < 0 || std::size_t(j) >= sys.maps.size())
            throw domain_error("word index out of range");
        y = sys.maps[std::size_t(j)].apply(y);
    }
    return y;
}

static void sort_dedup(std::vector<Vec>& pts) {
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
}

static std::vector<Vec> expand_once(const SelfSimilarSystem& sys, const std::vector<Vec>& pts,
                                    std::size_t cap) {
    if (pts.size() > cap / sys.maps.size())
        throw capacity_error("attractor cloud would exceed the point cap of " + std::to_string(cap) +
                             "; lower the depth or raise the cap");
    std::vector<Vec> out;
    out.reserve(pts.size() * sys.maps.size());
    for (const auto& f : sys.maps)
        for (const auto& p : pts) out.push_back(f.apply(p));
    sort_dedup(out);
    return out;
}

static double set_distance_sup(const std::vector<Vec>& from, const std::vector<Vec>& to) {
    double worst = 0.0;
    for (const auto& p : from) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& q : to) {
            double d = euclidean(p, q);
            if (d < best) best = d;
            if (best <= worst) break; // cannot raise the max any more
        }
        if (best > worst) worst = best;
    }
    return worst;
}

static std::vector<Vec> seed_points(const SelfSimilarSystem& sys, SeedMode seed) {
    std::vector<Vec> s;
    if (seed == SeedMode::first_map_fixed_point) {
        s.push_back(sys.fixed_point(0));
    } else {
        for (std::size_t j = 0; j < sys.maps.size(); ++j) s.push_back(sys.fixed_point(j));
        sort_dedup(s);
    }
    return s;
}

// Bound on the Hausdorff distance from the seed set to the attractor:
// d(S0, F) <= d(S0, Phi^K S0) / (1 - rmax^K).
static double seed_gap(const SelfSimilarSystem& sys, const std::vector<Vec>& s0, std::size_t cap) {
    double rmax = sys.ratio_max();
    std::vector<Vec> cur = s0;
    int K = 0;
    do {
        cur = expand_once(sys, cur, cap);
        ++K;
    } while (K < 8 && cur.size() <= 30000 / sys.maps.size());
    double gap = set_distance_sup(cur, s0); // s0 subset of cur, so d_H is one-sided
    return gap / (1.0 - std::pow(rmax, K));
}

PointCloud attractor_cloud(const SelfSimilarSystem& sys, int depth, SeedMode seed,
                           std::size_t point_cap) {
    sys.validate();
    if (depth < 0) throw domain_error("depth must be nonnegative");
    std::vector<Vec> pts = seed_points(sys, seed);
    double gap0 = seed_gap(sys, pts, point_cap);
    for (int d = 0; d < depth; ++d) pts = expand_once(sys, pts, point_cap);
    PointCloud c;
    c.ambient_dim = sys.ambient_dim;
    c.points = std::move(pts);
    c.depth = depth;
    c.dirt = std::pow(sys.ratio_max(), depth) * gap0;
    return c;
}

double hausdorff_distance(const PointCloud& a, const PointCloud& b) {
    if (a.points.empty() || b.points.empty())
        throw domain_error("hausdorff distance of an empty cloud");
    return std::max(set_distance_sup(a.points, b.points), set_distance_sup(b.points, a.points));
}

SeparationInterval separation_delta(const SelfSimilarSystem& sys, int depth, SeedMode seed) {
    if (depth < 1) throw domain_error("separation needs depth >= 1");
    PointCloud base = attractor_cloud(sys, depth - 1, seed);
    std::vector<std::vector<Vec>> images(sys.maps.size());
    for (std::size_t j = 0; j < sys.maps.size(); ++j) {
        images[j].reserve(base.points.size());
        for (const auto& p : base.points) images[j].push_back(sys.maps[j].apply(p));
    }
    double est = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < images.size(); ++j)
        for (std::size_t k = j + 1; k < images.size(); ++k)
            for (const auto& p : images[j])
                for (const auto& q : images[k]) {
                    double d = euclidean(p, q);
                    if (d < est) est = d;
                }
    double dirt_d = sys.ratio_max() * base.dirt; // dirt of the depth-d images
    SeparationInterval out;
    out.hi = est;
    out.lo = std::max(0.0, est - 2.0 * dirt_d);
    return out;
}

} // namespace cdim
