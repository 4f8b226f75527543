#pragma once
#include <complex>
#include <string>
#include <vector>

#include "cdim/step_function.hpp"
#include "cdim/strings.hpp"

namespace cdim {

using cplx = std::complex<double>;

struct PowerTerm {
    double coeff = 0.0;
    double scale = 0.0; // contributes coeff * scale^s

    // exact rational scale p/q when the input carried one (den == 0 otherwise)
    long long scale_num = 0, scale_den = 0;
};

// entire(s) + numerator(s) / (1 - sum_j ratios[j]^s)
struct RationalZeta {
    std::vector<PowerTerm> entire;
    std::vector<PowerTerm> numerator;
    std::vector<double> ratios;

    cplx entire_at(cplx s) const;
    cplx numerator_at(cplx s) const;
    cplx denominator_at(cplx s) const;
    cplx denominator_deriv_at(cplx s) const;
    cplx eval_unchecked(cplx s) const;
};

// Evaluate with a pole guard: throws when s is within 1e-12 of a pole
// (estimated as |den| / |den'|).
cplx zeta_eval(const RationalZeta& z, cplx s);

struct SeriesValue {
    cplx value{0.0, 0.0};
    double tail_bound = 0.0;
    bool trusted = false; // false when the tail estimate is not geometric or Re(s) <= D
};

// Partial sum of sum_n m_n l_n^s over the first `terms` distinct lengths,
// with a geometric tail estimate from the trailing term decay.
SeriesValue truncated_series(FractalString& s, cplx at, std::size_t terms);

// Geometric zeta of a self-similar string: sum_k (L g_k)^s / (1 - sum_j r_j^s).
RationalZeta self_similar_zeta(const StringGaps& gaps);

// Closed-form box-counting zeta for a delta-disjoint system, assembled from
// the renewal error term L (which must vanish past 1/delta).
RationalZeta delta_disjoint_box_zeta(const std::vector<double>& ratios, double x1, double delta,
                                     const StepFunction& L);

enum class TailPolicy {
    constant,      // trust the last segment of L as the exact tail
    trailing_mean, // replace the tail coefficient by the mean of L over the last decade
};

struct ZetaEvaluator {
    RationalZeta closed;
    double sigma0 = 0.0;          // abscissa right of which the form is valid
    bool sigma0_heuristic = false; // true when sigma0 came from the empirical tail of L

    cplx eval(cplx s) const { return zeta_eval(closed, s); }
};

// Box-counting zeta under the open set condition: works for any finite step
// error term, including ones that never vanish.
ZetaEvaluator osc_box_zeta(const std::vector<double>& ratios, double x1, const StepFunction& L,
                           TailPolicy policy = TailPolicy::constant);

struct Residue {
    cplx value{0.0, 0.0};
    bool removable = false;  // numerator vanished at the pole candidate
    double numerator_norm = 0.0;
};

// Residue at a simple denominator root: numerator(w) / sum_j r_j^w log(1/r_j).
// Throws when the denominator derivative vanishes (pole not simple).
Residue residue_simple(const RationalZeta& z, cplx omega, double removable_tol = 1e-9);

std::string zeta_json(const RationalZeta& z);

} // namespace cdim
