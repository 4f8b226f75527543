#include "cdim/zeta.hpp"
#include "cdim/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace cdim {

namespace {

cplx power(double scale, cplx s) { return std::exp(s * std::log(scale)); }

void add_term(std::vector<PowerTerm>& terms, double coeff, double scale) {
    if (coeff == 0.0) return;
    for (auto& t : terms) {
        if (std::fabs(t.scale - scale) <= 1e-12 * scale) {
            t.coeff += coeff;
            return;
        }
    }
    PowerTerm t;
    t.coeff = coeff;
    t.scale = scale;
    terms.push_back(t);
}

void tidy(std::vector<PowerTerm>& terms) {
    terms.erase(std::remove_if(terms.begin(), terms.end(),
                               [](const PowerTerm& t) { return std::fabs(t.coeff) < 1e-14; }),
                terms.end());
    std::sort(terms.begin(), terms.end(),
              [](const PowerTerm& a, const PowerTerm& b) { return a.scale > b.scale; });
}

} // namespace

cplx RationalZeta::entire_at(cplx s) const {
    cplx acc{0.0, 0.0};
    for (const auto& t : entire) acc += t.coeff * power(t.scale, s);
    return acc;
}

cplx RationalZeta::numerator_at(cplx s) const {
    cplx acc{0.0, 0.0};
    for (const auto& t : numerator) acc += t.coeff * power(t.scale, s);
    return acc;
}

cplx RationalZeta::denominator_at(cplx s) const {
    cplx acc{1.0, 0.0};
    for (double r : ratios) acc -= power(r, s);
    return acc;
}

cplx RationalZeta::denominator_deriv_at(cplx s) const {
    cplx acc{0.0, 0.0};
    for (double r : ratios) acc -= power(r, s) * std::log(r);
    return acc;
}

cplx RationalZeta::eval_unchecked(cplx s) const {
    return entire_at(s) + numerator_at(s) / denominator_at(s);
}

cplx zeta_eval(const RationalZeta& z, cplx s) {
    cplx den = z.denominator_at(s);
    cplx dden = z.denominator_deriv_at(s);
    double dist = std::abs(dden) > 0.0 ? std::abs(den) / std::abs(dden)
                                       : std::abs(den);
    if (dist <= 1e-12)
        throw domain_error("zeta evaluation within 1e-12 of a pole");
    return z.entire_at(s) + z.numerator_at(s) / den;
}

SeriesValue truncated_series(FractalString& s, cplx at, std::size_t terms) {
    SeriesValue out;
    if (terms == 0) return out;
    if (s.lengths.size() < terms && s.generator) {
        // grow until enough terms exist; the generator works by length cutoff
        double cut = s.lengths.empty() ? 1.0 : s.lengths.back();
        while (s.lengths.size() < terms) {
            cut *= 0.5;
            std::size_t before = s.lengths.size();
            s.ensure_down_to(cut);
            if (s.lengths.size() == before && cut < 1e-300) break;
        }
    }
    std::size_t n = std::min(terms, s.lengths.size());
    std::vector<double> mags;
    for (std::size_t i = 0; i < n; ++i) {
        cplx term = double(s.multiplicities[i]) * power(s.lengths[i], at);
        out.value += term;
        mags.push_back(std::abs(term));
    }
    // geometric tail estimate from the trailing decay
    if (n >= 4) {
        double q = 0.0;
        for (std::size_t i = n - 3; i < n; ++i) q = std::max(q, mags[i] / mags[i - 1]);
        if (q < 1.0) {
            out.tail_bound = mags[n - 1] * q / (1.0 - q);
            out.trusted = true;
        }
    }
    return out;
}

RationalZeta self_similar_zeta(const StringGaps& gaps) {
    RationalZeta z;
    for (double g : gaps.gaps) add_term(z.numerator, 1.0, gaps.total_length * g);
    tidy(z.numerator);
    z.ratios = gaps.ratios;
    return z;
}

RationalZeta delta_disjoint_box_zeta(const std::vector<double>& ratios, double x1, double delta,
                                     const StepFunction& L) {
    if (!(delta > 0.0) || !(x1 > 0.0)) throw domain_error("x1 and delta must be positive");
    double dinv = 1.0 / delta;
    if (std::fabs(L.tail_value()) > 1e-9 ||
        (!L.breakpoints.empty() && L.breakpoints.back() > dinv * (1.0 + 1e-9)))
        throw domain_error("the renewal error term does not vanish past 1/delta; "
                           "use osc_box_zeta instead");
    RationalZeta z;
    add_term(z.entire, 1.0, 1.0 / x1);
    add_term(z.numerator, double(ratios.size()) - 1.0, 1.0 / x1);
    // E(s) = s * integral_{x1}^{inf} L(x) x^{-s-1} dx, piece (a,b] of height c
    // contributing c (a^{-s} - b^{-s})
    for (std::size_t i = 0; i + 1 < L.values.size(); ++i) {
        double a = (i == 0) ? 0.0 : L.breakpoints[i - 1];
        double b = L.breakpoints[i];
        double c = L.values[i];
        double lo = std::max(a, x1);
        if (b <= x1 * (1.0 + 1e-12) || c == 0.0) continue;
        add_term(z.numerator, c, 1.0 / lo);
        add_term(z.numerator, -c, 1.0 / b);
    }
    tidy(z.numerator);
    z.ratios = ratios;
    return z;
}

ZetaEvaluator osc_box_zeta(const std::vector<double>& ratios, double x1, const StepFunction& L,
                           TailPolicy policy) {
    if (!(x1 > 0.0)) throw domain_error("x1 must be positive");
    ZetaEvaluator ev;
    RationalZeta& z = ev.closed;
    add_term(z.entire, 1.0, 1.0 / x1);
    add_term(z.numerator, double(ratios.size()) - 1.0, 1.0 / x1);
    for (std::size_t i = 0; i + 1 < L.values.size(); ++i) {
        double a = (i == 0) ? 0.0 : L.breakpoints[i - 1];
        double b = L.breakpoints[i];
        double c = L.values[i];
        double lo = std::max(a, x1);
        if (b <= x1 * (1.0 + 1e-12) || c == 0.0) continue;
        add_term(z.numerator, c, 1.0 / lo);
        add_term(z.numerator, -c, 1.0 / b);
    }
    double tail_from = L.breakpoints.empty() ? x1 : std::max(L.breakpoints.back(), x1);
    double tail_coeff = L.tail_value();
    if (policy == TailPolicy::trailing_mean && !L.breakpoints.empty()) {
        // Lebesgue mean of L over the last decade before the tail
        double hi = L.breakpoints.back(), lo = hi / 10.0;
        double mass = 0.0;
        for (std::size_t i = 0; i + 1 < L.values.size(); ++i) {
            double a = (i == 0) ? 0.0 : L.breakpoints[i - 1];
            double b = L.breakpoints[i];
            double aa = std::max(a, lo), bb = std::min(b, hi);
            if (bb > aa) mass += L.values[i] * (bb - aa);
        }
        tail_coeff = mass / (hi - lo);
    }
    if (tail_coeff != 0.0) {
        add_term(z.numerator, tail_coeff, 1.0 / tail_from);
        ev.sigma0 = 0.0; // E only converges for Re s > 0 with a nonvanishing tail
        ev.sigma0_heuristic = true;
    } else {
        ev.sigma0 = -std::numeric_limits<double>::infinity();
        ev.sigma0_heuristic = false;
    }
    tidy(z.numerator);
    z.ratios = ratios;
    return ev;
}

Residue residue_simple(const RationalZeta& z, cplx omega, double removable_tol) {
    cplx num = z.numerator_at(omega);
    cplx dden = z.denominator_deriv_at(omega);
    Residue r;
    r.numerator_norm = std::abs(num);
    if (std::abs(dden) < 1e-12)
        throw domain_error("denominator derivative vanishes: the pole is not simple");
    if (r.numerator_norm <= removable_tol) {
        r.removable = true;
        return r;
    }
    r.value = num / dden; // dden = -sum r^w log r = sum r^w log(1/r)
    return r;
}

std::string zeta_json(const RationalZeta& z) {
    auto fmt = [](double v) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };
    nlohmann::json j;
    j["entire"] = nlohmann::json::array();
    j["numerator"] = nlohmann::json::array();
    j["ratios"] = nlohmann::json::array();
    for (const auto& t : z.entire) j["entire"].push_back({fmt(t.coeff), fmt(t.scale)});
    for (const auto& t : z.numerator) j["numerator"].push_back({fmt(t.coeff), fmt(t.scale)});
    for (double r : z.ratios) j["ratios"].push_back(fmt(r));
    return j.dump(2);
}

} // namespace cdim
