#include "cdim/packing.hpp"
#include "cdim/errors.hpp"

#include <algorithm>
#include <atomic>
#include <climits>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <cstring>
#include <functional>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>
#include <unordered_map>

namespace cdim {

namespace {

constexpr double kSlack = 1e-12; // borderline pairs count as overlapping

bool conflict(const Vec& a, const Vec& b, double radius) {
    return euclidean(a, b) <= 2.0 * radius * (1.0 + kSlack);
}

int line_packing(const std::vector<Vec>& pts, double radius) {
    std::vector<double> xs;
    xs.reserve(pts.size());
    for (const auto& p : pts) xs.push_back(p[0]);
    std::sort(xs.begin(), xs.end());
    // Greedy left-to-right is optimal for points on a line.
    int count = 0;
    double gap = 2.0 * radius * (1.0 + kSlack);
    double last = -std::numeric_limits<double>::infinity();
    for (double x : xs) {
        if (x - last > gap) {
            ++count;
            last = x;
        }
    }
    return count;
}

// Conflict graph via a uniform grid so neighbor search stays near-linear.
std::vector<std::vector<int>> build_adjacency(const std::vector<Vec>& pts, double radius) {
    const int n = int(pts.size());
    const int m = int(pts[0].size());
    const double cell = 2.0 * radius * (1.0 + kSlack) * (1.0 + 1e-9);
    std::vector<std::int64_t> coords(std::size_t(n) * std::size_t(m));
    for (int i = 0; i < n; ++i)
        for (int d = 0; d < m; ++d)
            coords[std::size_t(i) * std::size_t(m) + std::size_t(d)] =
                std::int64_t(std::floor(pts[std::size_t(i)][std::size_t(d)] / cell));
    auto hash_at = [&](const std::int64_t* c) {
        std::uint64_t h = 1469598103934665603ULL;
        for (int d = 0; d < m; ++d) h = (h ^ std::uint64_t(c[d])) * 1099511628211ULL;
        return h;
    };
    std::unordered_map<std::uint64_t, std::vector<int>> cells;
    for (int i = 0; i < n; ++i) cells[hash_at(&coords[std::size_t(i) * std::size_t(m)])].push_back(i);

    std::vector<std::vector<int>> adj(std::size_t(n), std::vector<int>{});
    std::vector<std::int64_t> probe(std::size_t(m), 0);
    std::vector<int> digit(std::size_t(m), 0);
    for (int i = 0; i < n; ++i) {
        std::fill(digit.begin(), digit.end(), -1);
        for (;;) {
            for (int d = 0; d < m; ++d)
                probe[std::size_t(d)] =
                    coords[std::size_t(i) * std::size_t(m) + std::size_t(d)] + digit[std::size_t(d)];
            auto it = cells.find(hash_at(probe.data()));
            if (it != cells.end()) {
                for (int j : it->second) {
                    // hash buckets can mix cells; conflict() re-checks the distance
                    if (j > i && conflict(pts[std::size_t(i)], pts[std::size_t(j)], radius)) {
                        adj[std::size_t(i)].push_back(j);
                        adj[std::size_t(j)].push_back(i);
                    }
                }
            }
            int d = 0;
            while (d < m && digit[std::size_t(d)] == 1) {
                digit[std::size_t(d)] = -1;
                ++d;
            }
            if (d == m) break;
            ++digit[std::size_t(d)];
        }
    }
    for (auto& lst : adj) {
        std::sort(lst.begin(), lst.end());
        lst.erase(std::unique(lst.begin(), lst.end()), lst.end());
    }
    return adj;
}

struct MisSolver {
    const std::vector<std::vector<int>>& adj;
    std::vector<int> cell; // geometric cell id per vertex; same cell => clique
    int n_cells = 0;
    std::vector<char> alive;
    std::vector<int> degree;
    std::vector<int> stamp;      // scratch for clique-cover and adjacency marking
    std::vector<int> cell_stamp; // scratch for the cell-count bound
    int stamp_cur = 0;
    int best = 0;
    int taken = 0;

    MisSolver(const std::vector<std::vector<int>>& a, std::vector<int> cells, int nc)
        : adj(a), cell(std::move(cells)), n_cells(nc), alive(a.size(), 0),
          degree(a.size(), 0), stamp(a.size(), 0), cell_stamp(std::size_t(nc), 0) {}

    int solve(const std::vector<int>& verts) {
        for (int v : verts) alive[std::size_t(v)] = 1;
        for (int v : verts) {
            int d = 0;
            for (int w : adj[std::size_t(v)])
                if (alive[std::size_t(w)]) ++d;
            degree[std::size_t(v)] = d;
        }
        best = greedy_incumbent(verts);
        taken = 0;
        search(verts);
        for (int v : verts) alive[std::size_t(v)] = 0;
        return best;
    }

private:
    void remove_vertex(int v, std::vector<int>& undo) {
        alive[std::size_t(v)] = 0;
        undo.push_back(v);
        for (int w : adj[std::size_t(v)])
            if (alive[std::size_t(w)]) --degree[std::size_t(w)];
    }

    void restore(std::vector<int>& undo) {
        for (auto it = undo.rbegin(); it != undo.rend(); ++it) {
            alive[std::size_t(*it)] = 1;
            for (int w : adj[std::size_t(*it)])
                if (alive[std::size_t(w)]) ++degree[std::size_t(w)];
        }
    }

    // Min-degree greedy: a decent lower bound on geometric conflict graphs.
    int greedy_incumbent(const std::vector<int>& verts) {
        std::vector<int> undo;
        int count = 0;
        for (;;) {
            int pick = -1, mindeg = INT_MAX;
            for (int v : verts)
                if (alive[std::size_t(v)] && degree[std::size_t(v)] < mindeg) {
                    mindeg = degree[std::size_t(v)];
                    pick = v;
                }
            if (pick < 0) break;
            ++count;
            std::vector<int> nbs;
            for (int w : adj[std::size_t(pick)])
                if (alive[std::size_t(w)]) nbs.push_back(w);
            remove_vertex(pick, undo);
            for (int w : nbs) remove_vertex(w, undo);
        }
        restore(undo);
        return count;
    }

    // Cells have diameter at most the conflict distance, so each occupied cell
    // is a clique and the occupied-cell count bounds the MIS from above.
    int cell_bound(const std::vector<int>& active) {
        int mark = ++stamp_cur;
        int cells = 0;
        for (int v : active)
            if (alive[std::size_t(v)] && cell_stamp[std::size_t(cell[std::size_t(v)])] != mark) {
                cell_stamp[std::size_t(cell[std::size_t(v)])] = mark;
                ++cells;
            }
        return cells;
    }

    // Greedy clique cover of the alive subgraph: an independent set meets each
    // clique at most once, so the number of cliques bounds the MIS from above.
    int clique_cover(const std::vector<int>& active) {
        int covered = ++stamp_cur;
        int cliques = 0;
        std::vector<int> cand, next;
        for (int v : active) {
            if (!alive[std::size_t(v)] || stamp[std::size_t(v)] == covered) continue;
            ++cliques;
            stamp[std::size_t(v)] = covered;
            cand.clear();
            for (int w : adj[std::size_t(v)])
                if (alive[std::size_t(w)] && stamp[std::size_t(w)] != covered)
                    cand.push_back(w);
            while (!cand.empty()) {
                int u = cand.front();
                stamp[std::size_t(u)] = covered;
                next.clear();
                // keep candidates adjacent to the new clique member
                int mark = ++stamp_cur;
                for (int w : adj[std::size_t(u)])
                    if (stamp[std::size_t(w)] != covered) stamp[std::size_t(w)] = mark;
                for (int w : cand)
                    if (stamp[std::size_t(w)] == mark) next.push_back(w);
                cand.swap(next);
            }
        }
        return cliques;
    }

    void search(const std::vector<int>& verts) {
        std::vector<int> undo;
        std::vector<int> active;
        active.reserve(verts.size());
        for (int v : verts)
            if (alive[std::size_t(v)]) active.push_back(v);

        int local = 0;
        // Lossless reductions to a fixpoint:
        //  - simplicial vertex (alive neighborhood is a clique): take it;
        //    subsumes the degree 0/1 and triangle rules
        //  - domination (N[v] subset of N[u] for adjacent u,v): drop u, since
        //    any independent set using u can swap u for v
        std::vector<int> nb, nv;
        bool changed = true;
        while (changed) {
            changed = false;
            for (int v : active) {
                if (!alive[std::size_t(v)]) continue;
                nb.clear();
                for (int w : adj[std::size_t(v)])
                    if (alive[std::size_t(w)]) nb.push_back(w);
                bool clique = true;
                for (std::size_t a = 0; a < nb.size() && clique; ++a)
                    for (std::size_t b = a + 1; b < nb.size(); ++b)
                        if (!std::binary_search(adj[std::size_t(nb[a])].begin(),
                                                adj[std::size_t(nb[a])].end(), nb[b])) {
                            clique = false;
                            break;
                        }
                if (clique) {
                    ++local;
                    remove_vertex(v, undo);
                    for (int w : nb) remove_vertex(w, undo);
                    changed = true;
                    continue;
                }
                nv.assign(1, v);
                nv.insert(nv.end(), nb.begin(), nb.end());
                std::sort(nv.begin(), nv.end());
                for (int u : nb) {
                    if (!alive[std::size_t(u)]) continue;
                    bool sub = true;
                    for (int z : nv) {
                        if (z == u || !alive[std::size_t(z)]) continue;
                        if (!std::binary_search(adj[std::size_t(u)].begin(),
                                                adj[std::size_t(u)].end(), z)) {
                            sub = false;
                            break;
                        }
                    }
                    if (sub) {
                        remove_vertex(u, undo);
                        changed = true;
                    }
                }
            }
        }
        taken += local;

        int pick = -1, maxdeg = -1, remaining = 0;
        for (int v : active)
            if (alive[std::size_t(v)]) {
                ++remaining;
                if (degree[std::size_t(v)] > maxdeg) {
                    maxdeg = degree[std::size_t(v)];
                    pick = v;
                }
            }
        int ub = 0;
        if (pick >= 0) {
            ub = cell_bound(active);
            if (taken + ub > best) ub = std::min(ub, clique_cover(active));
        }
        if (pick < 0) {
            best = std::max(best, taken);
        } else if (taken + ub > best) {
            // include pick
            std::vector<int> undo_in;
            std::vector<int> nbs;
            for (int w : adj[std::size_t(pick)])
                if (alive[std::size_t(w)]) nbs.push_back(w);
            remove_vertex(pick, undo_in);
            for (int w : nbs) remove_vertex(w, undo_in);
            ++taken;
            search(active);
            --taken;
            restore(undo_in);

            // exclude pick
            if (taken + remaining - 1 > best) {
                std::vector<int> undo_ex;
                remove_vertex(pick, undo_ex);
                search(active);
                restore(undo_ex);
            }
        }

        taken -= local;
        restore(undo);
    }
};

} // namespace

int greedy_packing(const std::vector<Vec>& pts, double radius) {
    std::vector<Vec> sorted = pts;
    std::sort(sorted.begin(), sorted.end());
    std::vector<Vec> chosen;
    for (const auto& p : sorted) {
        bool ok = true;
        for (const auto& q : chosen)
            if (conflict(p, q, radius)) { ok = false; break; }
        if (ok) chosen.push_back(p);
    }
    return int(chosen.size());
}

int max_packing(const std::vector<Vec>& pts, double radius, std::size_t cap) {
    if (pts.empty()) return 0;
    if (!(radius > 0.0)) throw domain_error("packing radius must be positive");
    if (pts[0].size() == 1) return line_packing(pts, radius);
    if (pts.size() > cap)
        throw capacity_error("exact packing instance has " + std::to_string(pts.size()) +
                             " points (cap " + std::to_string(cap) +
                             "); use greedy_packing or raise the cap");
    auto adj = build_adjacency(pts, radius);
    const int n = int(pts.size());
    // Grid cells with diagonal <= the conflict distance, for the MIS cell bound.
    const int m = int(pts[0].size());
    const double side = 2.0 * radius * (1.0 + kSlack) / std::sqrt(double(m));
    std::vector<int> cell_of(std::size_t(n), 0);
    int n_cells = 0;
    {
        std::map<std::vector<std::int64_t>, int> ids;
        std::vector<std::int64_t> key(std::size_t(m), 0);
        for (int i = 0; i < n; ++i) {
            for (int d = 0; d < m; ++d)
                key[std::size_t(d)] =
                    std::int64_t(std::floor(pts[std::size_t(i)][std::size_t(d)] / side));
            auto [it, fresh] = ids.emplace(key, n_cells);
            if (fresh) ++n_cells;
            cell_of[std::size_t(i)] = it->second;
        }
    }
    std::vector<int> comp(std::size_t(n), -1);
    int total = 0;
    MisSolver solver(adj, std::move(cell_of), n_cells);
    std::vector<int> stack, verts;
    for (int s = 0; s < n; ++s) {
        if (comp[std::size_t(s)] >= 0) continue;
        verts.clear();
        stack.assign(1, s);
        comp[std::size_t(s)] = s;
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            verts.push_back(v);
            for (int w : adj[std::size_t(v)])
                if (comp[std::size_t(w)] < 0) {
                    comp[std::size_t(w)] = s;
                    stack.push_back(w);
                }
        }
        total += solver.solve(verts);
    }
    return total;
}

BoxProfile box_profile(const SelfSimilarSystem& sys, int depth, const std::vector<double>& x_grid,
                       SeedMode seed, std::size_t point_cap, std::size_t mis_cap) {
    PointCloud cloud = attractor_cloud(sys, depth, seed, point_cap);
    BoxProfile out;
    out.dirt = cloud.dirt;
    out.depth = depth;
    auto sample_at = [&cloud, mis_cap](double x) {
        if (!(x > 0.0)) throw domain_error("profile grid values must be positive");
        ProfileSample s;
        s.x = x;
        s.lo = max_packing(cloud.points, 1.0 / x, mis_cap);
        double hi_radius = 1.0 / x - cloud.dirt * (1.0 + 1e-9);
        if (hi_radius > 0.0) {
            s.hi = max_packing(cloud.points, hi_radius, mis_cap);
            s.resolved = (s.hi == s.lo);
        } else {
            s.hi = (long long)cloud.points.size();
            s.resolved = false;
        }
        return s;
    };
    unsigned threads = std::thread::hardware_concurrency();
    if (const char* env = std::getenv("COMPLEXDIM_THREADS")) {
        long v = std::strtol(env, nullptr, 10);
        if (v >= 1) threads = std::min<unsigned>(threads ? threads : 1, unsigned(v));
    }
    if (threads > 1 && x_grid.size() > 1) {
        out.samples.resize(x_grid.size());
        std::atomic<std::size_t> next{0};
        std::exception_ptr err;
        std::mutex err_mu;
        std::vector<std::thread> pool;
        unsigned n_workers = std::min<unsigned>(threads, unsigned(x_grid.size()));
        for (unsigned t = 0; t < n_workers; ++t)
            pool.emplace_back([&] {
                for (;;) {
                    std::size_t i = next.fetch_add(1);
                    if (i >= x_grid.size()) return;
                    try {
                        out.samples[i] = sample_at(x_grid[i]);
                    } catch (...) {
                        std::lock_guard<std::mutex> lk(err_mu);
                        if (!err) err = std::current_exception();
                        return;
                    }
                }
            });
        for (auto& th : pool) th.join();
        if (err) std::rethrow_exception(err);
    } else {
        for (double x : x_grid) out.samples.push_back(sample_at(x));
    }
    std::vector<double> bp, vals;
    if (!out.samples.empty()) {
        vals.push_back(double(out.samples.front().lo));
        for (std::size_t i = 1; i < out.samples.size(); ++i) {
            if (out.samples[i].lo != out.samples[i - 1].lo) {
                bp.push_back(std::sqrt(out.samples[i - 1].x * out.samples[i].x));
                vals.push_back(double(out.samples[i].lo));
            }
        }
    } else {
        vals.push_back(0.0);
    }
    out.lo_profile = StepFunction(std::move(bp), std::move(vals));
    return out;
}

namespace {

// Collapsed bracket value at x, retrying tiny perturbations in case the
// sample sits exactly on a jump. Returns -1 if unresolved.
long long collapsed_value(const PointCloud& cloud, double x, std::size_t mis_cap) {
    for (double bump : {1.0, 1.0 + 3e-8, 1.0 - 3e-8}) {
        double xx = x * bump;
        double hi_radius = 1.0 / xx - cloud.dirt * (1.0 + 1e-9);
        if (!(hi_radius > 0.0)) return -1;
        long long lo = max_packing(cloud.points, 1.0 / xx, mis_cap);
        long long hi = max_packing(cloud.points, hi_radius, mis_cap);
        if (lo == hi) return lo;
    }
    return -1;
}

} // namespace

std::optional<double> refine_jump(const SelfSimilarSystem& sys, const PointCloud& cloud,
                                  double x_left, double x_right, double rel_tol,
                                  std::size_t mis_cap) {
    (void)sys;
    long long vl = collapsed_value(cloud, x_left, mis_cap);
    long long vr = collapsed_value(cloud, x_right, mis_cap);
    if (vl < 0 || vr < 0 || vl == vr) return std::nullopt;
    while (x_right - x_left > rel_tol * x_right) {
        double mid = std::sqrt(x_left * x_right);
        long long vm = collapsed_value(cloud, mid, mis_cap);
        if (vm < 0) break; // inside the resolution band around the jump
        if (vm == vl)
            x_left = mid;
        else
            x_right = mid;
    }
    return std::sqrt(x_left * x_right);
}

long long renewal_box_count(const std::vector<double>& ratios, double delta,
                            const StepFunction& base, double base_valid_to, double x) {
    if (!(delta > 0.0)) throw domain_error("renewal needs a positive delta");
    if (base_valid_to < 1.0 / delta - 1e-12)
        throw domain_error("renewal base table stops at " + std::to_string(base_valid_to) +
                           " but must cover (0, " + std::to_string(1.0 / delta) + "]");
    std::unordered_map<std::uint64_t, long long> memo;
    auto key = [](double v) {
        std::uint64_t k;
        static_assert(sizeof(k) == sizeof(v));
        std::memcpy(&k, &v, sizeof(k));
        return k;
    };
    std::function<long long(double)> go = [&](double xx) -> long long {
        if (xx <= base_valid_to) return llround(base(xx));
        auto it = memo.find(key(xx));
        if (it != memo.end()) return it->second;
        long long acc = 0;
        for (double r : ratios) acc += go(r * xx);
        memo[key(xx)] = acc;
        return acc;
    };
    return go(x);
}

StepFunction lalley_L(const std::vector<double>& ratios, const StepFunction& profile,
                      double valid_to, std::optional<double> delta) {
    std::vector<double> cand;
    for (double b : profile.breakpoints) {
        if (b <= valid_to * (1 + 1e-12)) cand.push_back(b);
        for (double r : ratios) {
            double scaled = b / r;
            if (scaled <= valid_to * (1 + 1e-12)) cand.push_back(scaled);
        }
    }
    cand.push_back(valid_to);
    std::sort(cand.begin(), cand.end());
    cand.erase(std::unique(cand.begin(), cand.end(),
                           [](double a, double b) { return std::fabs(a - b) <= 1e-12 * b; }),
               cand.end());

    auto L_at = [&](double x) {
        double acc = profile(x);
        for (double r : ratios) acc -= profile(r * x);
        return acc;
    };

    std::vector<double> bp, vals;
    for (double x : cand) {
        bp.push_back(x);
        vals.push_back(L_at(x)); // segment (prev, x] carries the value at x
    }
    vals.push_back(vals.empty() ? 0.0 : vals.back()); // extend the last segment
    StepFunction L(std::move(bp), std::move(vals));
    L.compress(1e-9);

    if (delta) {
        double dinv = 1.0 / *delta;
        long long n_maps = (long long)ratios.size();
        for (std::size_t i = 0; i < L.values.size(); ++i) {
            double v = L.values[i];
            double seg_end = (i < L.breakpoints.size()) ? L.breakpoints[i]
                                                        : std::numeric_limits<double>::infinity();
            double seg_begin = (i == 0) ? 0.0 : L.breakpoints[i - 1];
            if (std::fabs(v - std::round(v)) > 1e-6 || v > 1e-9 || v < double(1 - n_maps) - 1e-9)
                throw inconsistency_error("renewal error term is not in [1-N, 0] near x = " +
                                          std::to_string(seg_end));
            if (i > 0 && v < L.values[i - 1] - 1e-9)
                throw inconsistency_error("renewal error term decreases at x = " +
                                          std::to_string(seg_begin) +
                                          "; the system is not delta-disjoint at delta = " +
                                          std::to_string(*delta));
            if (seg_begin >= dinv * (1 - 1e-12) && std::fabs(v) > 1e-9)
                throw inconsistency_error("renewal error term does not vanish past 1/delta, e.g. at x = " +
                                          std::to_string(seg_begin) + "; use the oscillatory form");
        }
    }
    return L;
}

StepFunction interval_box_profile(double length, double xmax) {
    if (!(length > 0.0) || !(xmax > 0.0)) throw domain_error("bad interval profile parameters");
    StepFunction f;
    f.values = {1.0};
    long long n_max = (long long)std::floor(length * xmax / 2.0);
    for (long long n = 1; n <= n_max; ++n) {
        f.breakpoints.push_back(2.0 * double(n) / length);
        f.values.push_back(double(n + 1));
    }
    return f;
}

std::string profile_csv(const BoxProfile& p) {
    std::ostringstream os;
    os.precision(17);
    os << "x,lo,hi,resolved\n";
    for (const auto& s : p.samples)
        os << s.x << "," << s.lo << "," << s.hi << "," << (s.resolved ? 1 : 0) << "\n";
    return os.str();
}

} // namespace cdim
