// Command-line front end: computes dimensions, box-count profiles, zeta
// functions, and measurability reports for self-similar systems and
// geometric fractal strings given as JSON specs.
#include "CLI11.hpp"
#include "json.hpp"

#include "cdim/analysis.hpp"
#include "cdim/errors.hpp"
#include "cdim/packing.hpp"
#include "cdim/roots.hpp"
#include "cdim/spec_io.hpp"
#include "cdim/strings.hpp"
#include "cdim/zeta.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

namespace fs = std::filesystem;
using namespace cdim;
using nlohmann::ordered_json;

namespace {

std::string num17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_atomic(const fs::path& path, const std::string& content) {
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw domain_error("cannot write " + tmp.string());
        out << content;
    }
    fs::rename(tmp, path);
}

int exit_code(errc c) {
    switch (c) {
    case errc::parse:
    case errc::domain: return 2;
    case errc::capacity: return 4;
    default: return 3; // indeterminate, inconsistency
    }
}

const char* errc_name(errc c) {
    switch (c) {
    case errc::parse: return "parse";
    case errc::domain: return "domain";
    case errc::capacity: return "capacity";
    case errc::inconsistency: return "inconsistency";
    default: return "indeterminate";
    }
}

ScalingVector scaling_of(const SystemSpec& spec) {
    ScalingVector v;
    if (spec.kind == SystemSpec::Kind::system) {
        for (const auto& f : spec.system.maps) v.ratios.push_back(f.ratio);
    } else {
        for (long long i = 0; i < spec.growth; ++i) v.ratios.push_back(spec.string_ratio);
    }
    return v;
}

RootSet roots_of(const ScalingVector& v, double D, double tmax) {
    auto cls = classify_lattice(v);
    if (std::holds_alternative<LatticeForm>(cls)) {
        Window w{-1e9, D + 0.5, tmax};
        return lattice_roots(std::get<LatticeForm>(cls), w);
    }
    Window w{std::min(0.0, D - 1.0), D + 0.5, tmax};
    return nonlattice_roots(v.values(), w);
}

// geometric zeta of a direct string spec: m1 l1^s / (1 - growth * r^s)
RationalZeta string_zeta(const SystemSpec& spec) {
    RationalZeta z;
    PowerTerm t;
    t.coeff = double(spec.first_multiplicity);
    t.scale = spec.first_length.value;
    if (spec.first_length.kind == Ratio::Kind::rational) {
        t.scale_num = spec.first_length.num;
        t.scale_den = spec.first_length.den;
    }
    z.numerator.push_back(t);
    for (long long i = 0; i < spec.growth; ++i) z.ratios.push_back(spec.string_ratio.value);
    return z;
}

struct BoxPipeline {
    ZetaEvaluator zeta;
    StepFunction profile; // exact N on (0, valid_to]
    StepFunction error_term;
    double valid_to = 0.0;
    double x1 = 0.0;
    std::optional<double> delta; // set when the system is provably delta-disjoint
    bool closed_form = false;    // delta-disjoint closed corollary applied
};

// Empirical box-counting zeta of a system attractor. Interval attractors
// take the exact arithmetic profile; everything else goes through packing
// brackets with jump refinement.
BoxPipeline box_pipeline(const SelfSimilarSystem& sys, int depth, double xmax) {
    BoxPipeline out;
    const auto ratios = sys.ratios();

    if (auto len = interval_attractor_length(sys)) {
        out.valid_to = std::max(xmax, 64.0 / *len);
        out.profile = interval_box_profile(*len, out.valid_to);
        out.x1 = 2.0 / *len;
        out.error_term = lalley_L(ratios, out.profile, out.valid_to);
        out.zeta = osc_box_zeta(ratios, out.x1, out.error_term, TailPolicy::trailing_mean);
        return out;
    }

    PointCloud cloud = attractor_cloud(sys, depth, SeedMode::all_map_fixed_points);
    SeparationInterval sep = separation_delta(sys, depth, SeedMode::all_map_fixed_points);

    // hull diameter bounds the very first jump: N=1 until 2/x < diam
    double diam = 0.0;
    for (const auto& p : cloud.points)
        diam = std::max(diam, euclidean(cloud.points.front(), p));
    double x_lo = 2.0 / (diam + 2.0 * cloud.dirt + 1e-30);

    // collapsed values on a geometric grid, then bisect each change
    const int per_octave = 16;
    std::vector<double> grid;
    for (double x = x_lo * 0.98; x <= xmax; x *= std::pow(2.0, 1.0 / per_octave))
        grid.push_back(x);
    grid.push_back(xmax);
    BoxProfile prof = box_profile(sys, depth, grid, SeedMode::all_map_fixed_points);

    std::vector<double> bps, vals;
    long long prev = -1;
    double prev_x = 0.0;
    for (const auto& s : prof.samples) {
        if (!s.resolved)
            throw indeterminate_error("box-count bracket did not collapse at x = " +
                                      std::to_string(s.x) + "; increase --depth");
        if (prev < 0) {
            if (s.lo != 1)
                throw indeterminate_error("profile must start at 1; lower the grid start");
            vals.push_back(1.0);
        } else if (s.lo != prev) {
            auto j = refine_jump(sys, cloud, prev_x, s.x);
            if (!j)
                throw indeterminate_error("could not localize the jump between x = " +
                                          std::to_string(prev_x) + " and " + std::to_string(s.x));
            bps.push_back(*j);
            vals.push_back(double(s.lo));
        }
        prev = s.lo;
        prev_x = s.x;
    }
    if (bps.empty()) throw indeterminate_error("no jumps below xmax; increase --xmax");
    out.profile = StepFunction(std::move(bps), std::move(vals));
    out.valid_to = xmax;
    out.x1 = out.profile.breakpoints.front();

    if (sep.separated()) {
        double delta = sep.lo;
        if (xmax >= 1.0 / delta) {
            out.error_term = lalley_L(ratios, out.profile, out.valid_to, delta);
            out.zeta.closed = delta_disjoint_box_zeta(ratios, out.x1, delta, out.error_term);
            out.zeta.sigma0 = 0.0;
            out.delta = delta;
            out.closed_form = true;
            return out;
        }
    }
    out.error_term = lalley_L(ratios, out.profile, out.valid_to);
    out.zeta = osc_box_zeta(ratios, out.x1, out.error_term, TailPolicy::constant);
    return out;
}

ordered_json lattice_json(const LatticeClass& cls) {
    ordered_json j;
    if (std::holds_alternative<LatticeForm>(cls)) {
        const auto& lf = std::get<LatticeForm>(cls);
        j["kind"] = "lattice";
        j["base"] = num17(lf.base);
        j["exponents"] = lf.exponents;
        j["period"] = num17(lf.period());
    } else {
        const auto& nv = std::get<NonlatticeVerdict>(cls);
        j["kind"] = "nonlattice";
        j["best_q"] = nv.best_q;
        j["defect"] = num17(nv.defect);
        j["q_cap"] = nv.q_cap;
    }
    return j;
}

std::string spec_name(const SystemSpec& spec, const std::string& path) {
    if (!spec.name.empty()) return spec.name;
    return fs::path(path).stem().string();
}

int cmd_dims(const std::string& spec_path, double tmax, const std::string& out_dir) {
    SystemSpec spec = load_spec(spec_path);
    ScalingVector v = scaling_of(spec);
    double D = moran_root(v.values());
    auto cls = classify_lattice(v);
    RootSet rs = roots_of(v, D, tmax);

    fs::path csv = fs::path(out_dir) / (spec_name(spec, spec_path) + "_roots.csv");
    write_atomic(csv, roots_csv(rs));

    ordered_json j;
    j["name"] = spec_name(spec, spec_path);
    j["dimension"] = num17(D);
    j["scaling"] = lattice_json(cls);
    j["roots"] = rs.roots.size();
    j["roots_csv"] = csv.string();
    std::cout << j.dump(2) << "\n";
    return 0;
}

int cmd_boxcount(const std::string& spec_path, int depth, double xmax,
                 const std::string& out_dir) {
    SystemSpec spec = load_spec(spec_path);
    if (spec.kind != SystemSpec::Kind::system)
        throw domain_error("boxcount needs a self-similar system spec");
    PointCloud cloud = attractor_cloud(spec.system, depth, SeedMode::all_map_fixed_points);
    double diam = 0.0;
    for (const auto& p : cloud.points)
        diam = std::max(diam, euclidean(cloud.points.front(), p));
    std::vector<double> grid;
    for (double x = 1.8 / (diam + 1e-30); x <= xmax; x *= std::pow(2.0, 1.0 / 16.0))
        grid.push_back(x);
    BoxProfile prof = box_profile(spec.system, depth, grid, SeedMode::all_map_fixed_points);

    fs::path csv = fs::path(out_dir) / (spec_name(spec, spec_path) + "_profile.csv");
    write_atomic(csv, profile_csv(prof));

    std::size_t resolved = 0;
    for (const auto& s : prof.samples) resolved += s.resolved ? 1 : 0;
    ordered_json j;
    j["name"] = spec_name(spec, spec_path);
    j["depth"] = depth;
    j["xmax"] = num17(xmax);
    j["dirt"] = num17(prof.dirt);
    j["samples"] = prof.samples.size();
    j["resolved"] = resolved;
    j["profile_csv"] = csv.string();
    std::cout << j.dump(2) << "\n";
    return 0;
}

int cmd_zeta(const std::string& spec_path, int depth, double xmax, const std::string& out_dir) {
    SystemSpec spec = load_spec(spec_path);
    ordered_json j;
    j["name"] = spec_name(spec, spec_path);
    RationalZeta z;
    if (spec.kind == SystemSpec::Kind::string) {
        z = string_zeta(spec);
        j["form"] = "geometric-string";
    } else {
        bool string_like = false;
        try {
            StringGaps gaps = gaps_of(spec.system);
            z = self_similar_zeta(gaps);
            j["form"] = "self-similar-string";
            string_like = true;
        } catch (const error&) {
        }
        if (!string_like) {
            BoxPipeline pipe = box_pipeline(spec.system, depth, xmax);
            z = pipe.zeta.closed;
            j["form"] = pipe.closed_form ? "box-delta-disjoint" : "box-osc";
            j["x1"] = num17(pipe.x1);
            if (pipe.delta) j["delta"] = num17(*pipe.delta);
            if (pipe.zeta.sigma0_heuristic) j["sigma0_heuristic"] = true;
        }
    }
    std::string text = zeta_json(z);
    fs::path out = fs::path(out_dir) / (spec_name(spec, spec_path) + "_zeta.json");
    write_atomic(out, text);
    j["zeta"] = ordered_json::parse(text);
    j["zeta_json"] = out.string();
    std::cout << j.dump(2) << "\n";
    return 0;
}

int cmd_report(const std::string& spec_path, int depth, double xmax, double tmax,
               const std::string& out_dir) {
    SystemSpec spec = load_spec(spec_path);
    ScalingVector v = scaling_of(spec);
    double D = moran_root(v.values());
    RationalZeta z;
    if (spec.kind == SystemSpec::Kind::string) {
        z = string_zeta(spec);
    } else {
        bool string_like = false;
        try {
            StringGaps gaps = gaps_of(spec.system);
            z = self_similar_zeta(gaps);
            string_like = true;
        } catch (const error&) {
        }
        if (!string_like) z = box_pipeline(spec.system, depth, xmax).zeta.closed;
    }
    RootSet rs = roots_of(v, D, tmax);
    MeasurabilityReport rep = measurability_report(z, rs, D);
    std::string text = report_json(rep);
    fs::path out = fs::path(out_dir) / (spec_name(spec, spec_path) + "_report.json");
    write_atomic(out, text);
    std::cout << text << "\n";
    return 0;
}

int cmd_approximate(const std::string& spec_path, int M, double tmax,
                    const std::string& out_dir) {
    SystemSpec spec = load_spec(spec_path);
    ScalingVector v = scaling_of(spec);
    DiophantineStep step = diophantine_sequence(v, M);

    ordered_json j;
    j["name"] = spec_name(spec, spec_path);
    j["M"] = M;
    j["q"] = step.q;
    j["defect"] = num17(step.defect);
    j["already_lattice"] = step.already_lattice;
    auto ratios = ordered_json::array();
    for (const auto& r : step.ratios.ratios) ratios.push_back(r.str());
    j["ratios"] = ratios;

    if (!step.already_lattice) {
        double D = moran_root(v.values());
        Window w{std::min(0.0, D - 1.0), D + 0.5, tmax};
        RootSet exact = nonlattice_roots(v.values(), w);
        RootSet approx = lattice_roots(step.form, w);
        MatchReport match = root_match(exact, approx, tmax);
        j["match"] = {{"matched", match.matched},
                      {"max_dist", num17(match.max_dist)},
                      {"mean_dist", num17(match.mean_dist)},
                      {"unmatched_exact", match.unmatched_a},
                      {"unmatched_approx", match.unmatched_b}};
        fs::path csv = fs::path(out_dir) / (spec_name(spec, spec_path) + "_approx_M" +
                                            std::to_string(M) + "_roots.csv");
        write_atomic(csv, roots_csv(approx));
        j["roots_csv"] = csv.string();
    }
    if (spec.kind == SystemSpec::Kind::system) {
        // approximant spec file with the replaced ratios
        ordered_json out_spec;
        out_spec["name"] = spec_name(spec, spec_path) + "-approx-M" + std::to_string(M);
        out_spec["kind"] = "system";
        out_spec["ambient_dim"] = spec.system.ambient_dim;
        auto maps = ordered_json::array();
        for (std::size_t i = 0; i < spec.system.maps.size(); ++i) {
            ordered_json m;
            m["ratio"] = step.ratios.ratios[i].str();
            auto tr = ordered_json::array();
            for (double t : spec.system.maps[i].translation) tr.push_back(t);
            m["translation"] = tr;
            if (!spec.system.maps[i].rotation.empty()) {
                auto rot = ordered_json::array();
                for (double r : spec.system.maps[i].rotation) rot.push_back(r);
                m["rotation"] = rot;
            }
            maps.push_back(m);
        }
        out_spec["maps"] = maps;
        fs::path sp = fs::path(out_dir) / (spec_name(spec, spec_path) + "_approx_M" +
                                           std::to_string(M) + ".json");
        write_atomic(sp, out_spec.dump(2) + "\n");
        j["approximant_spec"] = sp.string();
    }
    std::cout << j.dump(2) << "\n";
    return 0;
}

int cmd_explicit(const std::string& spec_path, double x, int terms, double) {
    SystemSpec spec = load_spec(spec_path);
    ScalingVector v = scaling_of(spec);
    double D = moran_root(v.values());

    RationalZeta z;
    FractalString str;
    if (spec.kind == SystemSpec::Kind::string) {
        z = string_zeta(spec);
        str = spec.make_string();
    } else {
        StringGaps gaps = gaps_of(spec.system);
        z = self_similar_zeta(gaps);
        str = self_similar_string(gaps);
    }

    // enough vertical extent to cover `terms` roots
    auto cls = classify_lattice(v);
    double tmax;
    if (std::holds_alternative<LatticeForm>(cls))
        tmax = std::get<LatticeForm>(cls).period() * (terms / 2.0 + 1.0);
    else
        tmax = 2.0 * 3.141592653589793 / std::log(1.0 / *std::max_element(
                   v.values().begin(), v.values().end())) * (terms / 2.0 + 1.0);
    RootSet rs = roots_of(v, D, tmax);
    std::vector<CountingTerm> ct = counting_terms(z, rs, tmax);
    std::sort(ct.begin(), ct.end(), [](const CountingTerm& a, const CountingTerm& b) {
        return std::fabs(a.location.imag()) < std::fabs(b.location.imag());
    });
    if (int(ct.size()) > terms) ct.resize(std::size_t(terms));
    // never split a conjugate pair: the truncated sum must stay real
    if (!ct.empty() && std::fabs(ct.back().location.imag()) > 1e-12) {
        cplx mate = std::conj(ct.back().location);
        bool paired = ct.size() >= 2 && std::abs(ct[ct.size() - 2].location - mate) < 1e-9;
        if (!paired) ct.pop_back();
    }

    std::optional<double> at_zero;
    cplx z0 = z.denominator_at(cplx(0.0, 0.0));
    if (std::abs(z0) > 1e-9) at_zero = zeta_eval(z, cplx(0.0, 0.0)).real();

    double formula = explicit_counting(ct, at_zero, x);
    long long direct = string_counting(str, x);

    ordered_json j;
    j["name"] = spec_name(spec, spec_path);
    j["x"] = num17(x);
    j["terms"] = ct.size();
    j["formula"] = num17(formula);
    j["direct"] = direct;
    j["difference"] = num17(formula - double(direct));
    j["relative_to_xD"] = num17((formula - double(direct)) / std::pow(x, D));
    std::cout << j.dump(2) << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"complex dimensions of self-similar sets and fractal strings"};
    app.require_subcommand(1);

    std::string spec_path, out_dir = ".";
    int depth = 6, terms = 100, M = 2;
    double xmax = 100.0, tmax = 50.0, x_at = 100.0, tolerance = 1e-9;

    auto add_common = [&](CLI::App* c) {
        c->add_option("spec", spec_path, "JSON spec file")->required();
        c->add_option("--out", out_dir, "output directory");
        c->add_option("--tolerance", tolerance, "numeric tolerance for verdicts");
    };

    auto* cdims = app.add_subcommand("dims", "Moran root, lattice verdict, complex roots CSV");
    add_common(cdims);
    cdims->add_option("--tmax", tmax, "vertical root window");

    auto* cbox = app.add_subcommand("boxcount", "box-count bracket profile CSV");
    add_common(cbox);
    cbox->add_option("--depth", depth, "attractor iteration depth");
    cbox->add_option("--xmax", xmax, "largest profile x");

    auto* czeta = app.add_subcommand("zeta", "zeta function JSON");
    add_common(czeta);
    czeta->add_option("--depth", depth, "attractor iteration depth");
    czeta->add_option("--xmax", xmax, "largest profile x");

    auto* crep = app.add_subcommand("report", "measurability report JSON");
    add_common(crep);
    crep->add_option("--depth", depth, "attractor iteration depth");
    crep->add_option("--xmax", xmax, "largest profile x");
    crep->add_option("--tmax", tmax, "vertical root window");

    auto* capx = app.add_subcommand("approximate", "lattice approximant + root match");
    add_common(capx);
    capx->add_option("--M", M, "approximation index (Fibonacci denominator cap)");
    capx->add_option("--tmax", tmax, "vertical root window");

    auto* cexp = app.add_subcommand("explicit", "explicit counting formula vs direct count");
    add_common(cexp);
    cexp->add_option("--x", x_at, "evaluation point");
    cexp->add_option("--terms", terms, "number of residue terms");

    CLI11_PARSE(app, argc, argv);

    try {
        if (cdims->parsed()) return cmd_dims(spec_path, tmax, out_dir);
        if (cbox->parsed()) return cmd_boxcount(spec_path, depth, xmax, out_dir);
        if (czeta->parsed()) return cmd_zeta(spec_path, depth, xmax, out_dir);
        if (crep->parsed()) return cmd_report(spec_path, depth, xmax, tmax, out_dir);
        if (capx->parsed()) return cmd_approximate(spec_path, M, tmax, out_dir);
        if (cexp->parsed()) return cmd_explicit(spec_path, x_at, terms, tolerance);
    } catch (const error& e) {
        ordered_json j;
        j["error"] = {{"code", errc_name(e.code())}, {"message", e.what()}};
        std::cerr << j.dump() << "\n";
        return exit_code(e.code());
    } catch (const std::exception& e) {
        ordered_json j;
        j["error"] = {{"code", "internal"}, {"message", e.what()}};
        std::cerr << j.dump() << "\n";
        return 1;
    }
    return 0;
}
