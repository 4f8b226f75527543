#include "cdim/spec_io.hpp"
#include "cdim/errors.hpp"
#include "json.hpp"

#include <fstream>
#include <sstream>

namespace cdim {

namespace {

using nlohmann::json;

// nlohmann reports byte offsets; translate to a line number for the message
std::string line_context(const std::string& text, std::size_t byte) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else
            ++col;
    }
    return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

Ratio ratio_field(const json& j, const std::string& where) {
    if (j.is_string()) return Ratio::parse(j.get<std::string>());
    if (j.is_number()) return Ratio::real(j.get<double>());
    throw parse_error(where + ": ratio must be a string like \"1/3\", \"0.25\" or \"2^-1.5\"");
}

} // namespace

FractalString SystemSpec::make_string() const {
    if (kind != Kind::string) throw domain_error("spec is not a string spec");
    return geometric_string(first_length.value, string_ratio.value, first_multiplicity, growth);
}

SystemSpec parse_spec(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw parse_error(std::string("malformed JSON (") + line_context(text, e.byte) +
                          "): " + e.what());
    }
    if (!doc.is_object()) throw parse_error("top level must be a JSON object");

    SystemSpec spec;
    spec.name = doc.value("name", std::string());
    std::string kind = doc.value("kind", std::string("system"));

    if (kind == "string") {
        spec.kind = SystemSpec::Kind::string;
        if (!doc.contains("first_length") || !doc.contains("ratio"))
            throw parse_error("string spec needs first_length and ratio");
        spec.first_length = ratio_field(doc["first_length"], "first_length");
        spec.string_ratio = ratio_field(doc["ratio"], "ratio");
        spec.first_multiplicity = doc.value("first_multiplicity", 1);
        spec.growth = doc.value("growth", 1);
        if (spec.first_multiplicity < 1 || spec.growth < 1)
            throw parse_error("multiplicities must be positive integers");
        return spec;
    }
    if (kind != "system") throw parse_error("kind must be \"system\" or \"string\"");

    if (!doc.contains("maps") || !doc["maps"].is_array())
        throw parse_error("system spec needs a maps array");
    spec.system.ambient_dim = doc.value("ambient_dim", 1);
    int m = spec.system.ambient_dim;
    if (m < 1) throw parse_error("ambient_dim must be >= 1");

    std::size_t idx = 0;
    for (const auto& jm : doc["maps"]) {
        std::string where = "maps[" + std::to_string(idx) + "]";
        if (!jm.is_object()) throw parse_error(where + " must be an object");
        Similarity f;
        if (!jm.contains("ratio")) throw parse_error(where + " missing ratio");
        f.ratio = ratio_field(jm["ratio"], where);
        if (jm.contains("translation")) {
            if (!jm["translation"].is_array() || int(jm["translation"].size()) != m)
                throw parse_error(where + ": translation must have ambient_dim entries");
            for (const auto& v : jm["translation"]) f.translation.push_back(v.get<double>());
        } else
            f.translation.assign(std::size_t(m), 0.0);
        if (jm.contains("rotation")) {
            const auto& jr = jm["rotation"];
            if (!jr.is_array() || int(jr.size()) != m * m)
                throw parse_error(where + ": rotation must be a row-major " + std::to_string(m) +
                                  "x" + std::to_string(m) + " matrix");
            for (const auto& v : jr) f.rotation.push_back(v.get<double>());
        }
        spec.system.maps.push_back(std::move(f));
        ++idx;
    }
    try {
        spec.system.validate();
    } catch (const error& e) {
        throw parse_error(std::string("invalid system: ") + e.what());
    }
    return spec;
}

SystemSpec load_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw parse_error("cannot open spec file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_spec(ss.str());
}

} // namespace cdim
