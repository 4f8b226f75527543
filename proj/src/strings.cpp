#include "cdim/strings.hpp"
#include "cdim/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

namespace cdim {

void FractalString::validate() const {
    if (lengths.size() != multiplicities.size())
        throw domain_error("string lengths and multiplicities differ in size");
    for (std::size_t i = 0; i < lengths.size(); ++i) {
        if (!(lengths[i] > 0.0)) throw domain_error("string lengths must be positive");
        if (i > 0 && !(lengths[i] < lengths[i - 1]))
            throw domain_error("string lengths must be strictly decreasing");
        if (multiplicities[i] < 1) throw domain_error("string multiplicities must be >= 1");
    }
}

void FractalString::ensure_down_to(double min_length) {
    if (generator && min_length < materialized_down_to) {
        generator(*this, min_length);
        materialized_down_to = min_length;
    }
}

long long FractalString::total_terms() const { return (long long)lengths.size(); }

long long string_counting(FractalString& s, double x) {
    if (!(x > 0.0)) throw domain_error("counting function needs x > 0");
    s.ensure_down_to(1.0 / x * (1.0 - 1e-12));
    long long acc = 0;
    for (std::size_t i = 0; i < s.lengths.size(); ++i) {
        if (s.lengths[i] * x >= 1.0 - 1e-12)
            acc += s.multiplicities[i];
        else
            break;
    }
    return acc;
}

StringGaps gaps_of(const SelfSimilarSystem& sys) {
    sys.validate();
    if (sys.ambient_dim != 1)
        throw domain_error("gaps are defined for one-dimensional systems only");
    double rsum = 0.0;
    for (const auto& f : sys.maps) rsum += f.ratio.value;
    if (rsum >= 1.0 - 1e-12)
        throw domain_error("the contraction ratios sum to " + std::to_string(rsum) +
                           " >= 1: the system does not define a fractal string");
    // Convex hull [a, b] of the attractor by iterating the interval map.
    double a = sys.fixed_point(0)[0], b = a;
    for (std::size_t j = 1; j < sys.maps.size(); ++j) {
        double p = sys.fixed_point(j)[0];
        a = std::min(a, p);
        b = std::max(b, p);
    }
    for (int iter = 0; iter < 200; ++iter) {
        double na = std::numeric_limits<double>::infinity(), nb = -na;
        for (const auto& f : sys.maps) {
            double u = f.apply({a})[0], v = f.apply({b})[0];
            na = std::min(na, std::min(u, v));
            nb = std::max(nb, std::max(u, v));
        }
        a = na;
        b = nb;
    }
    double L = b - a;
    if (!(L > 0.0)) throw domain_error("attractor hull is degenerate");

    std::vector<std::pair<double, double>> imgs;
    for (const auto& f : sys.maps) {
        double u = f.apply({a})[0], v = f.apply({b})[0];
        imgs.emplace_back(std::min(u, v), std::max(u, v));
    }
    std::sort(imgs.begin(), imgs.end());
    StringGaps out;
    out.total_length = L;
    for (std::size_t i = 0; i + 1 < imgs.size(); ++i) {
        if (imgs[i + 1].first < imgs[i].second - 1e-12 * L)
            throw domain_error("map images overlap; gap structure is undefined");
        double g = imgs[i + 1].first - imgs[i].second;
        if (g > 1e-12 * L) out.gaps.push_back(g / L);
    }
    if (out.gaps.empty())
        throw domain_error("images leave no gaps; the attractor is an interval, not a string");
    std::sort(out.gaps.begin(), out.gaps.end());
    for (const auto& f : sys.maps) {
        out.ratios.push_back(f.ratio.value);
        out.ratio_forms.push_back(f.ratio);
    }
    double check = 0.0;
    for (double g : out.gaps) check += g;
    for (double r : out.ratios) check += r;
    if (std::fabs(check - 1.0) > 1e-12)
        throw inconsistency_error("gaps and ratios do not add up to 1");
    return out;
}

std::optional<double> interval_attractor_length(const SelfSimilarSystem& sys) {
    sys.validate();
    if (sys.ambient_dim != 1) return std::nullopt;
    double rsum = 0.0;
    for (const auto& f : sys.maps) rsum += f.ratio.value;
    if (std::fabs(rsum - 1.0) > 1e-9) return std::nullopt;
    double a = sys.fixed_point(0)[0], b = a;
    for (std::size_t j = 1; j < sys.maps.size(); ++j) {
        double p = sys.fixed_point(j)[0];
        a = std::min(a, p);
        b = std::max(b, p);
    }
    for (int iter = 0; iter < 200; ++iter) {
        double na = std::numeric_limits<double>::infinity(), nb = -na;
        for (const auto& f : sys.maps) {
            double u = f.apply({a})[0], v = f.apply({b})[0];
            na = std::min(na, std::min(u, v));
            nb = std::max(nb, std::max(u, v));
        }
        a = na;
        b = nb;
    }
    double L = b - a;
    if (!(L > 0.0)) return std::nullopt;
    std::vector<std::pair<double, double>> imgs;
    for (const auto& f : sys.maps) {
        double u = f.apply({a})[0], v = f.apply({b})[0];
        imgs.emplace_back(std::min(u, v), std::max(u, v));
    }
    std::sort(imgs.begin(), imgs.end());
    double edge = a;
    for (const auto& [u, v] : imgs) {
        if (u > edge + 1e-9 * L || u < edge - 1e-9 * L) return std::nullopt;
        edge = v;
    }
    if (std::fabs(edge - b) > 1e-9 * L) return std::nullopt;
    return L;
}

namespace {

// All values L*g_k*r_w with value >= t, merged over equal values.
void collect_terms(const StringGaps& gaps, double t, std::size_t cap,
                   std::vector<double>& lengths, std::vector<long long>& mults) {
    double gmax = gaps.gaps.back();
    double scale = gaps.total_length;
    std::map<double, long long, std::greater<double>> acc;
    std::size_t produced = 0;
    std::vector<double> stack{1.0};
    while (!stack.empty()) {
        double p = stack.back();
        stack.pop_back();
        for (double g : gaps.gaps) {
            double v = scale * g * p;
            if (v >= t) {
                // merge values equal to within 1e-12 relative
                auto it = acc.lower_bound(v * (1.0 + 1e-12));
                if (it != acc.end() && std::fabs(it->first - v) <= 1e-12 * v) {
                    ++it->second;
                } else {
                    acc.emplace_hint(it, v, 1);
                    if (++produced > cap)
                        throw capacity_error("string materialization exceeds the term cap");
                }
            }
        }
        for (double r : gaps.ratios)
            if (scale * gmax * p * r >= t) stack.push_back(p * r);
    }
    lengths.clear();
    mults.clear();
    for (const auto& [v, m] : acc) {
        lengths.push_back(v);
        mults.push_back(m);
    }
}

} // namespace

FractalString self_similar_string(const StringGaps& gaps, std::size_t term_cap) {
    FractalString s;
    s.materialized_down_to = std::numeric_limits<double>::infinity();
    double largest = gaps.total_length * gaps.gaps.back();
    s.generator = [gaps, term_cap](FractalString& self, double min_length) {
        collect_terms(gaps, min_length, term_cap, self.lengths, self.multiplicities);
    };
    s.ensure_down_to(largest * 0.5); // materialize the first block
    return s;
}

FractalString geometric_string(double l1, double ratio, long long m1, long long growth,
                               std::size_t term_cap) {
    if (!(l1 > 0.0) || !(ratio > 0.0 && ratio < 1.0) || m1 < 1 || growth < 1)
        throw domain_error("bad geometric string parameters");
    FractalString s;
    s.materialized_down_to = std::numeric_limits<double>::infinity();
    s.generator = [l1, ratio, m1, growth, term_cap](FractalString& self, double min_length) {
        double l = self.lengths.empty() ? l1 : self.lengths.back() * ratio;
        long long m = self.multiplicities.empty() ? m1 : self.multiplicities.back() * growth;
        while (l >= min_length) {
            if (self.lengths.size() >= term_cap)
                throw capacity_error("string materialization exceeds the term cap");
            if (growth > 1 && m > (std::numeric_limits<long long>::max() / growth))
                throw capacity_error("string multiplicities overflow");
            self.lengths.push_back(l);
            self.multiplicities.push_back(m);
            l *= ratio;
            m *= growth;
        }
    };
    s.ensure_down_to(l1 * ratio);
    return s;
}

FractalString box_string(const StepFunction& profile, double valid_to) {
    FractalString s;
    double prev = profile.values.empty() ? 0.0 : profile.values[0];
    if (std::llround(prev) != 1)
        throw indeterminate_error("box profile must start at 1 before the first jump");
    for (std::size_t i = 0; i < profile.breakpoints.size(); ++i) {
        double y = profile.breakpoints[i];
        if (y > valid_to * (1 + 1e-12)) break;
        double cur = profile.values[i + 1];
        double lo = std::min(prev, cur), hi = std::max(prev, cur);
        if (std::fabs(lo - std::llround(lo)) > 1e-6 || std::fabs(hi - std::llround(hi)) > 1e-6)
            throw indeterminate_error("box profile value is not an integer near x = " + std::to_string(y) +
                                      "; brackets did not collapse on (" + std::to_string(y) + ", ...)");
        long long jump = std::llround(cur) - std::llround(prev);
        if (jump < 1)
            throw inconsistency_error("box profile does not increase at x = " + std::to_string(y));
        // first multiplicity is the full count after the first jump, later
        // ones are the jump sizes
        long long mult = s.lengths.empty() ? std::llround(cur) : jump;
        s.lengths.push_back(1.0 / y);
        s.multiplicities.push_back(mult);
        prev = cur;
    }
    if (s.lengths.empty())
        throw indeterminate_error("box profile has no jumps in the valid range");
    // lengths came out decreasing because breakpoints increase
    s.validate();
    return s;
}

RegressionReport dimension_regress(const std::vector<std::pair<double, double>>& samples) {
    if (samples.size() < 8) throw domain_error("regression needs at least 8 samples");
    double xmin = std::numeric_limits<double>::infinity(), xmax = 0.0;
    for (const auto& [x, n] : samples) {
        if (!(x > 0.0) || !(n > 0.0)) throw domain_error("regression samples must be positive");
        xmin = std::min(xmin, x);
        xmax = std::max(xmax, x);
    }
    if (xmax / xmin < 1e3) throw domain_error("regression samples must span at least 3 decades");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& [x, n] : samples) {
        double lx = std::log(x), ly = std::log(n);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    double n = double(samples.size());
    RegressionReport r;
    r.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    r.intercept = (sy - r.slope * sx) / n;
    for (const auto& [x, v] : samples)
        r.residual_band = std::max(r.residual_band,
                                   std::fabs(std::log(v) - (r.intercept + r.slope * std::log(x))));
    return r;
}

ContentBounds content_bounds(const std::vector<std::pair<double, double>>& samples, double D,
                             double window_decades) {
    if (samples.empty()) throw domain_error("content bounds need samples");
    double xmax = 0.0;
    for (const auto& [x, n] : samples) xmax = std::max(xmax, x);
    double xlo = xmax / std::pow(10.0, window_decades);
    ContentBounds b;
    b.lower = std::numeric_limits<double>::infinity();
    b.upper = 0.0;
    for (const auto& [x, n] : samples) {
        if (x < xlo) continue;
        double c = n / std::pow(x, D);
        b.lower = std::min(b.lower, c);
        b.upper = std::max(b.upper, c);
    }
    return b;
}

std::string string_csv(const FractalString& s) {
    std::ostringstream os;
    os.precision(17);
    os << "length,multiplicity\n";
    for (std::size_t i = 0; i < s.lengths.size(); ++i)
        os << s.lengths[i] << "," << s.multiplicities[i] << "\n";
    return os.str();
}

} // namespace cdim
