#include "cdim/roots.hpp"
#include "cdim/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace cdim {

namespace {

constexpr double kPi = 3.14159265358979323846;

cplx rpow(double r, cplx s) { return std::exp(s * std::log(r)); }

} // namespace

std::vector<double> ScalingVector::values() const {
    std::vector<double> v;
    v.reserve(ratios.size());
    for (const auto& r : ratios) v.push_back(r.value);
    return v;
}

double LatticeForm::period() const { return 2.0 * kPi / std::log(1.0 / base); }

double moran_root(const std::vector<double>& ratios) {
    if (ratios.size() < 2) throw domain_error("need at least 2 ratios");
    for (double r : ratios)
        if (!(r > 0.0 && r < 1.0)) throw domain_error("ratios must lie in (0,1)");
    auto f = [&](double s) {
        double acc = -1.0;
        for (double r : ratios) acc += std::pow(r, s);
        return acc;
    };
    auto fp = [&](double s) {
        double acc = 0.0;
        for (double r : ratios) acc += std::pow(r, s) * std::log(r);
        return acc;
    };
    double lo = 0.0, hi = 1.0;
    while (f(hi) > 0.0) hi *= 2.0;
    for (int i = 0; i < 200; ++i) {
        double mid = 0.5 * (lo + hi);
        (f(mid) > 0.0 ? lo : hi) = mid;
        if (hi - lo < 1e-12) break;
    }
    double s = 0.5 * (lo + hi);
    for (int i = 0; i < 50; ++i) {
        double step = f(s) / fp(s);
        s -= step;
        if (std::fabs(step) < 1e-16) break;
    }
    if (std::fabs(f(s)) > 1e-14)
        throw indeterminate_error("Moran equation residual exceeds 1e-14");
    return s;
}

LatticeClass classify_lattice(const ScalingVector& v, long long q_cap, double tol) {
    const auto vals = v.values();
    if (vals.size() < 2) throw domain_error("need at least 2 ratios");
    const std::size_t n = vals.size();

    // Exact power forms over one base with integer exponents settle the
    // question without any search.
    bool all_power = true;
    for (const auto& r : v.ratios) all_power &= (r.kind == Ratio::Kind::power);
    if (all_power) {
        double b0 = v.ratios[0].base;
        bool same_base = true, integer_exp = true;
        for (const auto& r : v.ratios) {
            same_base &= std::fabs(r.base - b0) <= 1e-15 * std::fabs(b0);
            integer_exp &= std::fabs(r.exponent - std::llround(r.exponent)) <= 1e-12;
        }
        if (same_base && integer_exp) {
            std::vector<long long> k;
            for (const auto& r : v.ratios) k.push_back(std::llround(r.exponent));
            long long g = 0;
            for (long long e : k) g = std::gcd(g, e);
            LatticeForm lf;
            lf.base = b0 > 1.0 ? 1.0 / std::pow(b0, double(g)) : std::pow(b0, double(g));
            // normalize so base is in (0,1) and exponents are positive
            std::vector<long long> kk;
            for (long long e : k) kk.push_back(e / g);
            if (b0 > 1.0)
                for (auto& e : kk) e = -e;
            lf.exponents = kk;
            std::vector<std::pair<long long, long long>> hist;
            std::sort(kk.begin(), kk.end());
            for (long long e : kk) {
                if (!hist.empty() && hist.back().first == e)
                    ++hist.back().second;
                else
                    hist.emplace_back(e, 1);
            }
            for (auto& [e, m] : hist) {
                lf.distinct_exponents.push_back(e);
                lf.multiplicities.push_back(m);
            }
            return lf;
        }
    }

    // w_j = log r_j / log r_1; lattice iff some q <= q_cap puts every q w_j
    // within tol of an integer.
    std::vector<double> w(n);
    for (std::size_t j = 0; j < n; ++j) w[j] = std::log(vals[j]) / std::log(vals[0]);
    long long best_q = 1;
    double best_defect = std::numeric_limits<double>::infinity();
    for (long long q = 1; q <= q_cap; ++q) {
        double defect = 0.0;
        bool ok = true;
        for (std::size_t j = 0; j < n; ++j) {
            double t = q * w[j];
            double nearest = std::round(t);
            if (nearest < 1.0) { ok = false; break; }
            defect = std::max(defect, std::fabs(t - nearest));
        }
        if (!ok) continue;
        if (defect < best_defect) {
            best_defect = defect;
            best_q = q;
        }
        if (defect <= tol) {
            std::vector<long long> a(n);
            for (std::size_t j = 0; j < n; ++j) a[j] = std::llround(q * w[j]);
            long long g = 0;
            for (long long e : a) g = std::gcd(g, e);
            LatticeForm lf;
            lf.base = std::pow(vals[0], double(g) / double(q));
            for (long long e : a) lf.exponents.push_back(e / g);
            std::vector<long long> kk = lf.exponents;
            std::sort(kk.begin(), kk.end());
            for (long long e : kk) {
                if (!lf.distinct_exponents.empty() && lf.distinct_exponents.back() == e)
                    ++lf.multiplicities.back();
                else {
                    lf.distinct_exponents.push_back(e);
                    lf.multiplicities.push_back(1);
                }
            }
            return lf;
        }
    }
    NonlatticeVerdict nv;
    nv.best_q = best_q;
    nv.defect = best_defect;
    nv.q_cap = q_cap;
    nv.tolerance = tol;
    return nv;
}

namespace {

// Durand-Kerner on a real-coefficient polynomial given by coeffs[0..deg]
// (coeffs[k] multiplies z^k).
std::vector<cplx> poly_roots(const std::vector<double>& coeffs) {
    int deg = int(coeffs.size()) - 1;
    while (deg > 0 && coeffs[std::size_t(deg)] == 0.0) --deg;
    if (deg < 1) throw domain_error("constant polynomial has no roots");
    std::vector<cplx> c(coeffs.begin(), coeffs.begin() + deg + 1);
    for (auto& x : c) x /= c[std::size_t(deg)];
    auto eval = [&](cplx z) {
        cplx acc = 0.0;
        for (int k = deg; k >= 0; --k) acc = acc * z + c[std::size_t(k)];
        return acc;
    };
    double radius = 0.0;
    for (int k = 0; k < deg; ++k) radius = std::max(radius, std::abs(c[std::size_t(k)]));
    radius = 1.0 + radius;
    std::vector<cplx> z(std::size_t(deg), cplx{});
    cplx seed(0.4, 0.9);
    cplx acc(1.0, 0.0);
    for (int k = 0; k < deg; ++k) {
        acc *= seed;
        z[std::size_t(k)] = radius * acc / std::abs(acc) * (0.5 + 0.5 * (k + 1.0) / deg);
    }
    for (int iter = 0; iter < 2000; ++iter) {
        double worst = 0.0;
        for (int k = 0; k < deg; ++k) {
            cplx denom = 1.0;
            for (int j = 0; j < deg; ++j)
                if (j != k) denom *= (z[std::size_t(k)] - z[std::size_t(j)]);
            cplx step = eval(z[std::size_t(k)]) / denom;
            z[std::size_t(k)] -= step;
            worst = std::max(worst, std::abs(step));
        }
        if (worst < 1e-14) break;
    }
    return z;
}

cplx lattice_f(const LatticeForm& lf, cplx w) {
    cplx acc = 1.0;
    for (std::size_t u = 0; u < lf.distinct_exponents.size(); ++u)
        acc -= double(lf.multiplicities[u]) *
               rpow(lf.base, w * double(lf.distinct_exponents[u]));
    return acc;
}

cplx lattice_fp(const LatticeForm& lf, cplx w) {
    cplx acc = 0.0;
    double lr = std::log(lf.base);
    for (std::size_t u = 0; u < lf.distinct_exponents.size(); ++u) {
        double k = double(lf.distinct_exponents[u]);
        acc -= double(lf.multiplicities[u]) * k * lr * rpow(lf.base, w * k);
    }
    return acc;
}

} // namespace

RootSet lattice_roots(const LatticeForm& lf, const Window& w) {
    if (!(lf.base > 0.0 && lf.base < 1.0)) throw domain_error("lattice base must be in (0,1)");
    // roots of sum_u m_u z^{k_u} = 1 with z = r^s
    long long deg = *std::max_element(lf.distinct_exponents.begin(), lf.distinct_exponents.end());
    std::vector<double> coeffs(std::size_t(deg) + 1, 0.0);
    coeffs[0] = -1.0;
    for (std::size_t u = 0; u < lf.distinct_exponents.size(); ++u)
        coeffs[std::size_t(lf.distinct_exponents[u])] += double(lf.multiplicities[u]);
    std::vector<cplx> zs = poly_roots(coeffs);

    // cluster equal roots to recover multiplicities
    std::vector<std::pair<cplx, int>> clustered;
    std::sort(zs.begin(), zs.end(), [](cplx a, cplx b) {
        return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
    });
    for (cplx z : zs) {
        if (!clustered.empty() && std::abs(z - clustered.back().first) < 1e-6)
            ++clustered.back().second;
        else
            clustered.emplace_back(z, 1);
    }

    double a = std::log(1.0 / lf.base);
    double p = 2.0 * kPi / a;
    RootSet out;
    out.window = w;
    out.generator = lf;
    for (auto [z, mult] : clustered) {
        if (std::abs(z) < 1e-300) continue;
        cplx w0 = -std::log(z) / a; // principal branch
        // shift into the principal strip 0 <= Im < p
        double im = w0.imag();
        im -= std::floor(im / p) * p;
        w0 = cplx(w0.real(), im);
        if (w0.real() < w.sigma_min - 1e-12 || w0.real() > w.sigma_max + 1e-12) continue;
        long long n_lo = (long long)std::ceil((-w.t_max - w0.imag()) / p - 1e-12);
        long long n_hi = (long long)std::floor((w.t_max - w0.imag()) / p + 1e-12);
        for (long long n = n_lo; n <= n_hi; ++n) {
            cplx loc = w0 + cplx(0.0, double(n) * p);
            // polish on the actual Dirichlet polynomial, replica by replica
            for (int it = 0; it < 50; ++it) {
                cplx fv = lattice_f(lf, loc);
                cplx fpv = lattice_fp(lf, loc);
                if (std::abs(fpv) < 1e-300) break;
                cplx step = double(mult) * fv / fpv;
                loc -= step;
                if (std::abs(step) < 1e-15 * (1.0 + std::abs(loc))) break;
            }
            double res = std::abs(lattice_f(lf, loc));
            if (res > 1e-10)
                throw indeterminate_error("lattice root residual " + std::to_string(res) +
                                          " exceeds 1e-10");
            if (std::fabs(loc.imag()) > w.t_max + 1e-9) continue;
            Root r;
            r.location = loc;
            r.multiplicity = mult;
            r.residual = res;
            out.roots.push_back(r);
        }
    }
    std::sort(out.roots.begin(), out.roots.end(), [](const Root& x, const Root& y) {
        if (x.location.imag() != y.location.imag()) return x.location.imag() < y.location.imag();
        return x.location.real() < y.location.real();
    });
    return out;
}

namespace {

struct DirichletF {
    const std::vector<double>& ratios;
    cplx operator()(cplx s) const {
        cplx acc = 1.0;
        for (double r : ratios) acc -= rpow(r, s);
        return acc;
    }
    cplx deriv(cplx s) const {
        cplx acc = 0.0;
        for (double r : ratios) acc -= std::log(r) * rpow(r, s);
        return acc;
    }
};

struct ContourTooClose {};

// Net argument change of f along the straight segment from a to b,
// refining until each step turns by less than pi/2.
double arg_change(const DirichletF& f, cplx a, cplx b, int depth = 0) {
    cplx fa = f(a), fb = f(b);
    double scale = 1e-9;
    if (std::abs(fa) < scale || std::abs(fb) < scale) throw ContourTooClose{};
    double d = std::arg(fb / fa);
    if (std::fabs(d) < kPi / 2.0 && depth >= 4) return d;
    if (depth > 48) throw ContourTooClose{};
    cplx mid = 0.5 * (a + b);
    return arg_change(f, a, mid, depth + 1) + arg_change(f, mid, b, depth + 1);
}

int winding(const DirichletF& f, double x0, double x1, double y0, double y1) {
    cplx c00(x0, y0), c10(x1, y0), c11(x1, y1), c01(x0, y1);
    double total = arg_change(f, c00, c10) + arg_change(f, c10, c11) +
                   arg_change(f, c11, c01) + arg_change(f, c01, c00);
    double turns = total / (2.0 * kPi);
    long long n = std::llround(turns);
    if (std::fabs(turns - double(n)) > 1e-3)
        throw indeterminate_error("winding number did not converge to an integer");
    return int(n);
}

void subdivide(const DirichletF& f, double x0, double x1, double y0, double y1,
               std::vector<Root>& out, int depth) {
    int wn = -1;
    // nudge the box outward when a zero sits on (or too near) the contour
    double eps = 0.0;
    for (int attempt = 0; attempt < 10; ++attempt) {
        try {
            wn = winding(f, x0 - eps, x1 + eps, y0 - eps, y1 + eps);
            x0 -= eps; x1 += eps; y0 -= eps; y1 += eps;
            break;
        } catch (const ContourTooClose&) {
            eps = (eps == 0.0 ? 1e-7 : eps * 3.7) * (1.0 + 0.1 * attempt);
            eps *= std::max(1.0, std::max(x1 - x0, y1 - y0));
        }
    }
    if (wn < 0) throw indeterminate_error("could not stabilize the root-count contour");
    if (wn == 0) return;
    if (depth > 60) throw indeterminate_error("root subdivision exceeded the depth limit");

    double diag = std::hypot(x1 - x0, y1 - y0);
    if (wn == 1 || diag < 1e-7) {
        cplx s(0.5 * (x0 + x1), 0.5 * (y0 + y1));
        bool converged = false;
        for (int it = 0; it < 50; ++it) {
            cplx fv = f(s);
            cplx fpv = f.deriv(s);
            if (std::abs(fpv) < 1e-300) break;
            cplx step = double(wn) * fv / fpv;
            s -= step;
            if (std::abs(step) < 1e-15 * (1.0 + std::abs(s))) { converged = true; break; }
        }
        double res = std::abs(f(s));
        bool inside = s.real() > x0 - 1e-9 && s.real() < x1 + 1e-9 && s.imag() > y0 - 1e-9 &&
                      s.imag() < y1 + 1e-9;
        if (converged && inside && res <= 1e-10) {
            Root r;
            r.location = s;
            r.multiplicity = wn;
            r.residual = res;
            out.push_back(r);
            return;
        }
        if (diag < 1e-9)
            throw indeterminate_error("root finder stalled on a tiny cell");
    }
    if (x1 - x0 >= y1 - y0) {
        double xm = 0.5 * (x0 + x1);
        subdivide(f, x0, xm, y0, y1, out, depth + 1);
        subdivide(f, xm, x1, y0, y1, out, depth + 1);
    } else {
        double ym = 0.5 * (y0 + y1);
        subdivide(f, x0, x1, y0, ym, out, depth + 1);
        subdivide(f, x0, x1, ym, y1, out, depth + 1);
    }
}

} // namespace

int winding_count(const std::vector<double>& ratios, const Window& w) {
    if (!std::isfinite(w.sigma_min) || !std::isfinite(w.sigma_max) || !(w.t_max > 0.0))
        throw domain_error("winding count needs a finite rectangle");
    DirichletF f{ratios};
    double eps = 0.0;
    for (int attempt = 0; attempt < 10; ++attempt) {
        try {
            return winding(f, w.sigma_min - eps, w.sigma_max + eps, -w.t_max - eps,
                           w.t_max + eps);
        } catch (const ContourTooClose&) {
            eps = (eps == 0.0 ? 1e-7 : eps * 3.7) * (1.0 + 0.1 * attempt);
            eps *= std::max(1.0, std::max(w.sigma_max - w.sigma_min, 2.0 * w.t_max));
        }
    }
    throw indeterminate_error("could not stabilize the root-count contour");
}

RootSet nonlattice_roots(const std::vector<double>& ratios, const Window& w,
                         bool check_structure) {
    if (!std::isfinite(w.sigma_min) || !std::isfinite(w.sigma_max) || !(w.t_max > 0.0))
        throw domain_error("root search window must be a finite rectangle");
    DirichletF f{ratios};
    std::vector<Root> roots;
    subdivide(f, w.sigma_min, w.sigma_max, -w.t_max, w.t_max, roots, 0);

    // merge duplicates found near shared cell edges
    std::sort(roots.begin(), roots.end(), [](const Root& a, const Root& b) {
        if (a.location.imag() != b.location.imag()) return a.location.imag() < b.location.imag();
        return a.location.real() < b.location.real();
    });
    std::vector<Root> merged;
    for (const auto& r : roots) {
        if (!merged.empty() && std::abs(r.location - merged.back().location) < 1e-8)
            continue;
        merged.push_back(r);
    }
    // clip back to the requested window (the contour may have been nudged out)
    std::vector<Root> kept;
    for (const auto& r : merged) {
        if (r.location.real() < w.sigma_min - 1e-9 || r.location.real() > w.sigma_max + 1e-9)
            continue;
        if (std::fabs(r.location.imag()) > w.t_max + 1e-9) continue;
        kept.push_back(r);
    }

    if (check_structure) {
        double D = moran_root(ratios);
        if (D >= w.sigma_min && D <= w.sigma_max) {
            std::size_t on_line = 0;
            for (const auto& r : kept) {
                if (std::fabs(r.location.real() - D) <= 1e-8)
                    ++on_line;
                else if (r.location.real() > D + 1e-8)
                    throw inconsistency_error("found a root right of the similarity dimension");
            }
            if (on_line != 1)
                throw inconsistency_error("expected exactly one root on Re = D, found " +
                                          std::to_string(on_line));
        }
    }
    RootSet out;
    out.roots = std::move(kept);
    out.window = w;
    return out;
}

DiophantineStep diophantine_sequence(const ScalingVector& v, int M) {
    if (M < 1) throw domain_error("M must be positive");
    DiophantineStep out;
    auto cls = classify_lattice(v);
    if (std::holds_alternative<LatticeForm>(cls)) {
        out.ratios = v;
        out.form = std::get<LatticeForm>(cls);
        out.q = 1;
        out.defect = 0.0;
        out.already_lattice = true;
        return out;
    }
    auto vals = v.values();
    const std::size_t n = vals.size();
    std::vector<double> w(n);
    for (std::size_t j = 0; j < n; ++j) w[j] = std::log(vals[j]) / std::log(vals[0]);
    // Fibonacci cap: slow enough to follow convergents, fast enough to converge
    long long cap = 1, prev = 1;
    for (int i = 3; i <= M; ++i) {
        long long next = cap + prev;
        prev = cap;
        cap = next;
    }
    long long best_q = 0;
    double best_defect = std::numeric_limits<double>::infinity();
    for (long long q = 1; q <= cap; ++q) {
        double defect = 0.0;
        bool ok = true;
        for (std::size_t j = 0; j < n; ++j) {
            double t = q * w[j];
            if (std::round(t) < 1.0) { ok = false; break; }
            defect = std::max(defect, std::fabs(t - std::round(t)));
        }
        if (ok && defect < best_defect) {
            best_defect = defect;
            best_q = q;
        }
    }
    if (best_q == 0) throw indeterminate_error("no admissible denominator up to the cap");
    std::vector<long long> a(n);
    for (std::size_t j = 0; j < n; ++j) a[j] = std::llround(best_q * w[j]);
    long long g = 0;
    for (long long e : a) g = std::gcd(g, e);
    LatticeForm lf;
    lf.base = std::pow(vals[0], double(g) / double(best_q));
    for (long long e : a) lf.exponents.push_back(e / g);
    std::vector<long long> kk = lf.exponents;
    std::sort(kk.begin(), kk.end());
    for (long long e : kk) {
        if (!lf.distinct_exponents.empty() && lf.distinct_exponents.back() == e)
            ++lf.multiplicities.back();
        else {
            lf.distinct_exponents.push_back(e);
            lf.multiplicities.push_back(1);
        }
    }
    out.form = lf;
    out.q = best_q;
    out.defect = best_defect;
    for (std::size_t j = 0; j < n; ++j)
        out.ratios.ratios.push_back(Ratio::power(vals[0], double(a[j]) / double(best_q)));
    return out;
}

SelfSimilarSystem approximate_system(const SelfSimilarSystem& sys, int M) {
    ScalingVector v;
    for (const auto& f : sys.maps) v.ratios.push_back(f.ratio);
    DiophantineStep step = diophantine_sequence(v, M);
    SelfSimilarSystem out = sys;
    for (std::size_t j = 0; j < out.maps.size(); ++j) out.maps[j].ratio = step.ratios.ratios[j];
    return out;
}

MatchReport root_match(const RootSet& a, const RootSet& b, double t_max) {
    std::vector<cplx> pa, pb;
    for (const auto& r : a.roots)
        if (std::fabs(r.location.imag()) <= t_max) pa.push_back(r.location);
    for (const auto& r : b.roots)
        if (std::fabs(r.location.imag()) <= t_max) pb.push_back(r.location);
    std::vector<char> ua(pa.size(), 0), ub(pb.size(), 0);
    MatchReport rep;
    double total = 0.0;
    for (;;) {
        double best = std::numeric_limits<double>::infinity();
        std::size_t bi = 0, bj = 0;
        bool found = false;
        for (std::size_t i = 0; i < pa.size(); ++i) {
            if (ua[i]) continue;
            for (std::size_t j = 0; j < pb.size(); ++j) {
                if (ub[j]) continue;
                double d = std::abs(pa[i] - pb[j]);
                if (d < best) {
                    best = d;
                    bi = i;
                    bj = j;
                    found = true;
                }
            }
        }
        if (!found) break;
        ua[bi] = ub[bj] = 1;
        ++rep.matched;
        total += best;
        rep.max_dist = std::max(rep.max_dist, best);
    }
    rep.mean_dist = rep.matched ? total / double(rep.matched) : 0.0;
    rep.unmatched_a = std::count(ua.begin(), ua.end(), 0);
    rep.unmatched_b = std::count(ub.begin(), ub.end(), 0);
    return rep;
}

std::string roots_csv(const RootSet& rs) {
    std::ostringstream os;
    os.precision(17);
    os << "re,im,multiplicity,residual\n";
    for (const auto& r : rs.roots)
        os << r.location.real() << "," << r.location.imag() << "," << r.multiplicity << ","
           << r.residual << "\n";
    return os.str();
}

} // namespace cdim
