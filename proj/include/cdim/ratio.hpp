#pragma once
#include <cmath>
#include <cstdint>
#include <string>

namespace cdim {

// A contraction ratio in (0,1). The numeric value is always available; when
// the input was given as p/q or b^e the exact form is kept alongside so that
// lattice classification can work symbolically instead of through floats.
struct Ratio {
    enum class Kind { real, rational, power };

    Kind kind = Kind::real;
    double value = 0.0;
    std::int64_t num = 0, den = 1; // kind == rational
    double base = 0.0, exponent = 0.0; // kind == power: base^exponent

    static Ratio real(double v);
    static Ratio rational(std::int64_t p, std::int64_t q);
    static Ratio power(double b, double e);

    // Accepts "0.25", "1/3", "2^-1.618", "1/2^3" style text. Throws
    // cdim::error(errc::parse) on malformed input or value outside (0,1).
    static Ratio parse(const std::string& text);

    std::string str() const;
};

} // namespace cdim
