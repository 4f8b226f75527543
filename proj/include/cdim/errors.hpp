#pragma once
#include <stdexcept>
#include <string>

namespace cdim {

// Error categories map onto CLI exit codes: parse -> 2, indeterminate -> 3,
// capacity -> 4. Everything else is a plain failure (exit 1).
enum class errc {
    parse,
    domain,
    capacity,
    indeterminate,
    inconsistency,
};

class error : public std::runtime_error {
public:
    error(errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
    errc code() const { return code_; }

private:
    errc code_;
};

inline error parse_error(const std::string& what) { return error(errc::parse, what); }
inline error domain_error(const std::string& what) { return error(errc::domain, what); }
inline error capacity_error(const std::string& what) { return error(errc::capacity, what); }
inline error indeterminate_error(const std::string& what) { return error(errc::indeterminate, what); }
inline error inconsistency_error(const std::string& what) { return error(errc::inconsistency, what); }

} // namespace cdim
