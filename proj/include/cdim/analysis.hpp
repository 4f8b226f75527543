#pragma once
#include <optional>
#include <string>
#include <vector>

#include "cdim/roots.hpp"
#include "cdim/zeta.hpp"

namespace cdim {

enum class Verdict { measurable, not_measurable, indeterminate };

std::string verdict_str(Verdict v);

struct MeasurabilityReport {
    double dimension = 0.0;
    std::vector<cplx> principal_dims; // sorted by Im
    Verdict verdict = Verdict::indeterminate;
    std::optional<double> content;            // res / D when measurable
    std::optional<double> oscillation_period; // lattice vertical spacing
    std::string note;                         // why indeterminate, if so
};

// Roots with |Re - D| <= 1e-8, sorted by Im.
std::vector<cplx> principal_dims(const RootSet& roots, double D);

// Measurable iff D is the only principal dimension and a simple pole of
// zeta with nonvanishing numerator; then content = residue / D. Lattice
// lines of principal dims give not-measurable with the oscillation period.
// Indeterminate when the screen cannot be placed (non-principal roots come
// within 1e-6 of Re = D).
MeasurabilityReport measurability_report(const RationalZeta& zeta, const RootSet& roots,
                                         double D);

// Minkowski content of a fractal string: 2^{1-D} res(zeta; D) / (D (1-D)).
// Requires 0 < D < 1 and a sole principal dimension.
double minkowski_content_string(const RationalZeta& zeta, double D);

struct CountingTerm {
    cplx location;
    cplx residue;
};

// Residue terms for the explicit counting formula, one per root with |Im|
// bounded by t_cut, built from the zeta residues. Non-simple roots are
// rejected.
std::vector<CountingTerm> counting_terms(const RationalZeta& zeta, const RootSet& roots,
                                         double t_cut);

// Pointwise counting value sum res * x^w / w (+ zeta(0) when supplied).
// Terms are summed in order of |Im| with conjugates paired; the imaginary
// part must cancel to 1e-9.
double explicit_counting(const std::vector<CountingTerm>& terms,
                         std::optional<double> zeta_at_zero, double x);

// Growth exponent of a nondecreasing f by log-log tail regression.
// Constant tails short-circuit to 0.
double generalized_dimension(const std::vector<std::pair<double, double>>& samples);

struct SteadinessReport {
    bool steady = false;
    double c_lower = 0.0, c_upper = 0.0; // tail min/max of f(x)/x^D
    double rel_spread = 0.0;
};

// Tail min/max of f(x)/x^D over the last decade of samples; steady when
// they agree within rel_tol.
SteadinessReport steadiness(const std::vector<std::pair<double, double>>& samples, double D,
                            double rel_tol = 1e-2);

std::string report_json(const MeasurabilityReport& r);

} // namespace cdim
