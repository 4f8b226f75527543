#include "cdim/ratio.hpp"
#include "cdim/errors.hpp"

#include <charconv>
#include <numeric>
#include <sstream>

namespace cdim {

static void check_open_unit(double v, const std::string& text) {
    if (!(v > 0.0 && v < 1.0))
        throw parse_error("ratio '" + text + "' is not in (0,1)");
}

Ratio Ratio::real(double v) {
    check_open_unit(v, std::to_string(v));
    Ratio r;
    r.kind = Kind::real;
    r.value = v;
    return r;
}

Ratio Ratio::rational(std::int64_t p, std::int64_t q) {
    if (q == 0) throw parse_error("rational ratio with zero denominator");
    if (p < 0 || q < 0) throw parse_error("rational ratio must be positive");
    std::int64_t g = std::gcd(p, q);
    if (g > 1) { p /= g; q /= g; }
    Ratio r;
    r.kind = Kind::rational;
    r.num = p;
    r.den = q;
    r.value = double(p) / double(q);
    check_open_unit(r.value, std::to_string(p) + "/" + std::to_string(q));
    return r;
}

Ratio Ratio::power(double b, double e) {
    Ratio r;
    r.kind = Kind::power;
    r.base = b;
    r.exponent = e;
    r.value = std::pow(b, e);
    check_open_unit(r.value, "power form");
    return r;
}

static double parse_number(const std::string& s) {
    std::size_t pos = 0;
    double v;
    try {
        v = std::stod(s, &pos);
    } catch (const std::exception&) {
        throw parse_error("bad number '" + s + "'");
    }
    if (pos != s.size()) throw parse_error("trailing characters in number '" + s + "'");
    return v;
}

static bool parse_int(const std::string& s, std::int64_t& out) {
    const char* b = s.data();
    const char* e = b + s.size();
    auto res = std::from_chars(b, e, out);
    return res.ec == std::errc() && res.ptr == e;
}

Ratio Ratio::parse(const std::string& text) {
    auto caret = text.find('^');
    if (caret != std::string::npos) {
        std::string base_s = text.substr(0, caret);
        std::string exp_s = text.substr(caret + 1);
        double base;
        auto slash = base_s.find('/');
        if (slash != std::string::npos) {
            std::int64_t p, q;
            if (!parse_int(base_s.substr(0, slash), p) || !parse_int(base_s.substr(slash + 1), q) || q == 0)
                throw parse_error("bad base in '" + text + "'");
            base = double(p) / double(q);
        } else {
            base = parse_number(base_s);
        }
        double e = parse_number(exp_s);
        Ratio r = Ratio::power(base, e);
        check_open_unit(r.value, text);
        return r;
    }
    auto slash = text.find('/');
    if (slash != std::string::npos) {
        std::int64_t p, q;
        if (!parse_int(text.substr(0, slash), p) || !parse_int(text.substr(slash + 1), q))
            throw parse_error("bad rational '" + text + "'");
        return Ratio::rational(p, q);
    }
    return Ratio::real(parse_number(text));
}

std::string Ratio::str() const {
    std::ostringstream os;
    os.precision(17);
    switch (kind) {
    case Kind::rational:
        os << num << "/" << den;
        break;
    case Kind::power:
        os << base << "^" << exponent;
        break;
    case Kind::real:
        os.precision(17);
        os << value;
        break;
    }
    return os.str();
}

} // namespace cdim
