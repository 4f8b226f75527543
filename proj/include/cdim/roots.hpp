#pragma once
#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "cdim/geometry.hpp"
#include "cdim/ratio.hpp"

namespace cdim {

using cplx = std::complex<double>;

struct ScalingVector {
    std::vector<Ratio> ratios;

    std::vector<double> values() const;
};

// r_j = r^{k_j} with integer exponents of gcd 1.
struct LatticeForm {
    double base = 0.0;                   // the common ratio r in (0,1)
    std::vector<long long> exponents;    // k_j per map, ascending with the input order
    std::vector<long long> distinct_exponents; // k_u, ascending
    std::vector<long long> multiplicities;     // m_u matching distinct_exponents

    double period() const; // p = 2 pi / log(1/r)
};

struct NonlatticeVerdict {
    long long best_q = 0;   // best common denominator tried
    double defect = 0.0;    // max_j distance of q w_j from the integers
    long long q_cap = 0;
    double tolerance = 0.0; // the acceptance threshold the defect failed
};

using LatticeClass = std::variant<LatticeForm, NonlatticeVerdict>;

// Symbolic classification for exact rational or power forms, otherwise
// continued-fraction style search for a common denominator of the log ratios.
LatticeClass classify_lattice(const ScalingVector& v, long long q_cap = 100000,
                              double tol = 1e-9);

struct Window {
    double sigma_min = 0.0;
    double sigma_max = 1.0;
    double t_max = 10.0; // roots kept for |Im| <= t_max
};

struct Root {
    cplx location;
    int multiplicity = 1;
    double residual = 0.0; // |1 - sum r_j^w| after polish
};

struct RootSet {
    std::vector<Root> roots; // sorted by Im, then Re
    Window window;
    std::optional<LatticeForm> generator; // set when produced by lattice_roots
};

// Real root D of sum r_j^s = 1, |residual| <= 1e-14.
double moran_root(const std::vector<double>& ratios);

// Complex roots of 1 - sum m_u z^{k_u} ... = 0 via the polynomial in z = r^s,
// replicated along the vertical period.
RootSet lattice_roots(const LatticeForm& lf, const Window& w);

// Argument-principle root count (with multiplicity) over the window
// rectangle, without locating the roots.
int winding_count(const std::vector<double>& ratios, const Window& w);

// Argument-principle count plus adaptive subdivision and Newton polish.
// check_structure asserts exactly one root on Re = D (use for nonlattice
// vectors only).
RootSet nonlattice_roots(const std::vector<double>& ratios, const Window& w,
                         bool check_structure = true);

// Lattice approximations r_M to a nonlattice vector via simultaneous
// Diophantine approximation of w_j = log r_j / log r_1. M indexes a growing
// denominator cap. Lattice input comes back unchanged (with notice = true).
struct DiophantineStep {
    ScalingVector ratios;
    LatticeForm form;
    long long q = 0;
    double defect = 0.0;
    bool already_lattice = false;
};

DiophantineStep diophantine_sequence(const ScalingVector& v, int M);

// Same system with the ratios replaced by the M-th lattice approximation.
SelfSimilarSystem approximate_system(const SelfSimilarSystem& sys, int M);

struct MatchReport {
    double max_dist = 0.0;
    double mean_dist = 0.0;
    std::size_t matched = 0;
    std::size_t unmatched_a = 0, unmatched_b = 0;
};

// Greedy nearest-neighbor matching of two root sets restricted to |Im| <= t_max.
MatchReport root_match(const RootSet& a, const RootSet& b, double t_max);

std::string roots_csv(const RootSet& rs);

} // namespace cdim
