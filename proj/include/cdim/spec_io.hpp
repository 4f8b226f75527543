#pragma once
#include <string>

#include "cdim/geometry.hpp"
#include "cdim/strings.hpp"

namespace cdim {

// A parsed input document. Either a self-similar system (kind "system")
// or a directly specified geometric fractal string (kind "string", for
// sets that are not attractors of any self-similar system).
struct SystemSpec {
    enum class Kind { system, string };

    std::string name;
    Kind kind = Kind::system;

    SelfSimilarSystem system; // kind == system

    // kind == string: lengths l1 * ratio^n with multiplicities m1 * growth^n
    Ratio first_length;
    Ratio string_ratio;
    long long first_multiplicity = 1;
    long long growth = 1;

    FractalString make_string() const; // kind == string only
};

// Parses and validates a JSON spec. Errors carry line context for JSON
// syntax problems and field names for semantic ones.
SystemSpec parse_spec(const std::string& text);

SystemSpec load_spec(const std::string& path);

} // namespace cdim
