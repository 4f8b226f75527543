#include "cdim/analysis.hpp"
#include "cdim/errors.hpp"
#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>

namespace cdim {

std::string verdict_str(Verdict v) {
    switch (v) {
    case Verdict::measurable: return "measurable";
    case Verdict::not_measurable: return "not-measurable";
    default: return "indeterminate";
    }
}

std::vector<cplx> principal_dims(const RootSet& roots, double D) {
    std::vector<cplx> out;
    for (const auto& r : roots.roots)
        if (std::fabs(r.location.real() - D) <= 1e-8) out.push_back(r.location);
    std::sort(out.begin(), out.end(), [](cplx a, cplx b) { return a.imag() < b.imag(); });
    return out;
}

MeasurabilityReport measurability_report(const RationalZeta& zeta, const RootSet& roots,
                                         double D) {
    MeasurabilityReport rep;
    rep.dimension = D;

    // D itself must be a genuine (non-removable) simple pole.
    Residue at_d = residue_simple(zeta, cplx(D, 0.0));
    if (at_d.removable || std::fabs(zeta.denominator_at(cplx(D, 0.0)).real()) > 1e-9)
        throw inconsistency_error("the dimension is not a pole of the zeta function");

    // The rational form can carry denominator roots whose numerator also
    // vanishes; those are not poles and are dropped here. Vanishing is
    // judged relative to the numerator size at D.
    double ref = std::abs(at_d.value) * zeta.denominator_deriv_at(cplx(D, 0.0)).real();
    ref = std::max(std::fabs(ref), 1e-30);
    std::vector<Root> genuine;
    for (const auto& r : roots.roots) {
        Residue res = residue_simple(zeta, r.location, 1e-3 * ref);
        if (!res.removable) genuine.push_back(r);
    }
    RootSet pruned;
    pruned.roots = genuine;
    pruned.window = roots.window;
    pruned.generator = roots.generator;
    rep.principal_dims = principal_dims(pruned, D);

    if (rep.principal_dims.empty())
        throw inconsistency_error("the window does not contain the dimension");

    if (rep.principal_dims.size() > 1) {
        rep.verdict = Verdict::not_measurable;
        // vertical spacing of the principal line
        double gap = std::numeric_limits<double>::infinity();
        for (std::size_t i = 1; i < rep.principal_dims.size(); ++i)
            gap = std::min(gap, rep.principal_dims[i].imag() - rep.principal_dims[i - 1].imag());
        if (roots.generator)
            rep.oscillation_period = roots.generator->period();
        else
            rep.oscillation_period = gap;
        return rep;
    }

    // screen placement: a vertical line strictly between Re = D and every
    // other root, not through 0
    double below = -std::numeric_limits<double>::infinity();
    for (const auto& r : genuine)
        if (r.location.real() < D - 1e-8) below = std::max(below, r.location.real());
    if (std::isfinite(below) && D - below <= 1e-6) {
        rep.verdict = Verdict::indeterminate;
        rep.note = "no room for a screen between the dimension and the next root";
        return rep;
    }

    rep.verdict = Verdict::measurable;
    rep.content = at_d.value.real() / D;
    if (!(*rep.content > 0.0))
        throw inconsistency_error("nonpositive content from the residue");
    return rep;
}

double minkowski_content_string(const RationalZeta& zeta, double D) {
    if (!(D > 0.0 && D < 1.0)) throw domain_error("dimension must lie in (0,1)");
    ScalingVector v;
    for (double r : zeta.ratios) v.ratios.push_back(Ratio::real(r));
    if (std::holds_alternative<LatticeForm>(classify_lattice(v)))
        throw indeterminate_error(
            "lattice string: a full line of principal dimensions, not measurable");
    Residue res = residue_simple(zeta, cplx(D, 0.0));
    if (res.removable) throw inconsistency_error("the dimension is not a pole");
    return std::pow(2.0, 1.0 - D) * res.value.real() / (D * (1.0 - D));
}

std::vector<CountingTerm> counting_terms(const RationalZeta& zeta, const RootSet& roots,
                                         double t_cut) {
    std::vector<CountingTerm> out;
    for (const auto& r : roots.roots) {
        if (std::fabs(r.location.imag()) > t_cut) continue;
        if (r.multiplicity != 1)
            throw domain_error("explicit formula supports simple poles only");
        Residue res = residue_simple(zeta, r.location);
        if (res.removable) continue;
        out.push_back({r.location, res.value});
    }
    return out;
}

double explicit_counting(const std::vector<CountingTerm>& terms,
                         std::optional<double> zeta_at_zero, double x) {
    if (!(x > 0.0)) throw domain_error("x must be positive");
    std::vector<CountingTerm> sorted = terms;
    std::sort(sorted.begin(), sorted.end(), [](const CountingTerm& a, const CountingTerm& b) {
        double ia = std::fabs(a.location.imag()), ib = std::fabs(b.location.imag());
        if (ia != ib) return ia < ib;
        return a.location.imag() > b.location.imag();
    });
    cplx acc = 0.0;
    double lx = std::log(x);
    for (const auto& t : sorted) {
        if (std::abs(t.location) < 1e-300)
            throw domain_error("root at the origin: x^w/w undefined");
        acc += t.residue * std::exp(t.location * lx) / t.location;
    }
    if (std::fabs(acc.imag()) > 1e-9)
        throw inconsistency_error("imaginary residue " + std::to_string(acc.imag()) +
                                  " of the counting sum exceeds 1e-9");
    double out = acc.real();
    if (zeta_at_zero) out += *zeta_at_zero;
    return out;
}

double generalized_dimension(const std::vector<std::pair<double, double>>& samples) {
    for (std::size_t i = 1; i < samples.size(); ++i)
        if (samples[i].second < samples[i - 1].second - 1e-12)
            throw domain_error("samples must be nondecreasing");
    if (samples.empty()) throw domain_error("no samples");
    if (std::fabs(samples.back().second - samples.front().second) <=
        1e-12 * std::fabs(samples.back().second))
        return 0.0;
    return dimension_regress(samples).slope;
}

SteadinessReport steadiness(const std::vector<std::pair<double, double>>& samples, double D,
                            double rel_tol) {
    if (samples.empty()) throw domain_error("no samples");
    double xmax = samples.back().first;
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    std::size_t used = 0;
    for (const auto& [x, n] : samples) {
        if (x < xmax / 10.0) continue;
        double c = n / std::pow(x, D);
        lo = std::min(lo, c);
        hi = std::max(hi, c);
        ++used;
    }
    if (used < 2) throw domain_error("need at least two samples in the last decade");
    SteadinessReport rep;
    rep.c_lower = lo;
    rep.c_upper = hi;
    rep.rel_spread = (hi - lo) / hi;
    rep.steady = rep.rel_spread <= rel_tol;
    return rep;
}

namespace {
std::string num17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}
} // namespace

std::string report_json(const MeasurabilityReport& r) {
    nlohmann::ordered_json j;
    j["dimension"] = num17(r.dimension);
    j["verdict"] = verdict_str(r.verdict);
    if (r.content)
        j["content"] = num17(*r.content);
    else
        j["content"] = nullptr;
    auto dims = nlohmann::ordered_json::array();
    for (cplx d : r.principal_dims)
        dims.push_back({{"re", num17(d.real())}, {"im", num17(d.imag())}});
    j["principal_dims"] = dims;
    if (r.oscillation_period)
        j["period"] = num17(*r.oscillation_period);
    else
        j["period"] = nullptr;
    if (!r.note.empty()) j["note"] = r.note;
    return j.dump(2);
}

} // namespace cdim
