#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>

#include "mfd/bumps.hpp"
#include "mfd/energy.hpp"
#include "mfd/error.hpp"
#include "mfd/fields.hpp"
#include "mfd/grid.hpp"
#include "mfd/hopf.hpp"
#include "mfd/io.hpp"
#include "mfd/maps.hpp"
#include "mfd/minimizer.hpp"
#include "mfd/ode.hpp"
#include "mfd/profile.hpp"
#include "mfd/reich_strebel.hpp"
#include "mfd/weight.hpp"

namespace mfd::cli {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::stringstream ss(s);
    for (std::string p; std::getline(ss, p, sep);) {
        p = trim(p);
        if (!p.empty()) parts.push_back(p);
    }
    return parts;
}

}  // namespace

Config Config::parse(std::istream& in, const std::string& origin) {
    Config c;
    std::string line;
    for (std::size_t no = 1; std::getline(in, line); ++no) {
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto eq = t.find('=');
        const std::string where = origin + ":" + std::to_string(no);
        if (eq == std::string::npos) throw ConfigError(where + ": expected key = value");
        const std::string key = trim(t.substr(0, eq));
        if (key.empty() || !std::all_of(key.begin(), key.end(), [](char ch) {
                return (ch >= 'a' && ch <= 'z') || (ch >= '0' && ch <= '9') || ch == '_';
            }))
            throw ConfigError(where + ": bad key '" + key + "'");
        if (c.has(key)) throw ConfigError(where + ": duplicate key '" + key + "'");
        c.values_[key] = trim(t.substr(eq + 1));
    }
    return c;
}

Config Config::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file '" + path + "'");
    return parse(in, path);
}

std::string Config::text(const std::string& key, const std::string& fallback) const {
    auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
}

double Config::real(const std::string& key, double fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    try {
        std::size_t used = 0;
        double v = std::stod(it->second, &used);
        if (used == it->second.size()) return v;
    } catch (const std::exception&) {
    }
    throw ConfigError("key '" + key + "': expected a number, got '" + it->second + "'");
}

long Config::integer(const std::string& key, long fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    try {
        std::size_t used = 0;
        long v = std::stol(it->second, &used);
        if (used == it->second.size()) return v;
    } catch (const std::exception&) {
    }
    throw ConfigError("key '" + key + "': expected an integer, got '" + it->second + "'");
}

bool Config::flag(const std::string& key, bool fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    if (it->second == "true" || it->second == "1" || it->second == "yes") return true;
    if (it->second == "false" || it->second == "0" || it->second == "no") return false;
    throw ConfigError("key '" + key + "': expected true or false");
}

std::vector<std::string> Config::list(const std::string& key, const std::string& fallback) const {
    return split(text(key, fallback), ',');
}

void Config::require_known(const std::vector<std::string>& allowed,
                           const std::string& command) const {
    for (const auto& [key, value] : values_) {
        if (overrides_.count(key)) continue;
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
            throw ConfigError("unknown key '" + key + "' for command '" + command + "'");
    }
}

namespace {

const std::vector<std::string> kGridKeys = {"domain", "grid", "half_width", "y_min", "y_max", "rect"};

std::vector<std::string> with_grid(std::vector<std::string> keys) {
    keys.insert(keys.end(), kGridKeys.begin(), kGridKeys.end());
    return keys;
}

DomainSpec grid_spec(const Config& c, int default_n) {
    const DomainKind kind = parse_domain_kind(c.text("domain", "disk"));
    const long n = c.integer("grid", default_n);
    if (n < 8 || n > 4096) throw ConfigError("grid resolution must be in [8, 4096]");
    switch (kind) {
        case DomainKind::Disk: return DomainSpec::disk(static_cast<int>(n));
        case DomainKind::HalfPlane:
            return DomainSpec::half_plane(static_cast<int>(n), c.real("half_width", 20.0),
                                          c.real("y_min", 1e-3), c.real("y_max", 20.0));
        case DomainKind::Rectangle: {
            std::vector<double> v;
            for (const auto& s : c.list("rect", "0,1,0,1")) {
                Config one;
                one.set("rect", s);
                v.push_back(one.real("rect", 0.0));
            }
            if (v.size() != 4) throw ConfigError("rect expects x0,x1,y0,y1");
            return DomainSpec::rectangle(static_cast<int>(n), Box{v[0], v[1], v[2], v[3]});
        }
    }
    throw ConfigError("unknown domain");
}

// A map given in closed form, as a solved half-plane profile, or as a field file.
struct MapSource {
    std::string spec;
    std::optional<ClosedFormMap> closed;
    std::optional<ProfileSpec> profile;
    std::string file;

    MappingField sample(const GridPtr& grid) const {
        if (closed) return closed->sample(grid);
        if (profile) {
            const auto p = solve_profile(profile->psi, profile->eta, profile->lambda,
                                         grid->box().y1 * (1.0 + 1e-9));
            return build_half_plane_map(p, grid);
        }
        std::ifstream in(file);
        if (!in) throw DataError("cannot read field file '" + file + "'");
        return read_field_csv(in, grid);
    }

    WirtingerField derivatives(const MappingField& f, int order) const {
        if (closed) return closed->derivatives(f.grid_ptr(), &f.active_mask());
        if (profile) {
            const auto p = solve_profile(profile->psi, profile->eta, profile->lambda,
                                         f.grid().box().y1 * (1.0 + 1e-9));
            return half_plane_map_derivatives(p, f.grid_ptr());
        }
        return wirtinger_derivatives(f, order);
    }

    std::string name() const { return closed ? closed->name : spec; }
};

MapSource parse_source(const std::string& spec, const DomainGrid& grid) {
    MapSource m;
    m.spec = spec;
    if (spec.rfind("file:", 0) == 0) {
        m.file = spec.substr(5);
        if (m.file.empty()) throw ConfigError("file: needs a path");
    } else if (spec.rfind("profile:", 0) == 0) {
        if (grid.kind() != DomainKind::HalfPlane)
            throw ConfigError("profile maps live on the half-plane domain");
        m.profile = parse_profile_spec(spec.substr(8));
    } else {
        m.closed = parse_map(spec, grid);
    }
    return m;
}

int stencil_order(const Config& c) {
    const long o = c.integer("stencil_order", 4);
    if (o != 2 && o != 4) throw ConfigError("stencil_order must be 2 or 4");
    return static_cast<int>(o);
}

struct Output {
    std::filesystem::path dir;

    void text(const std::string& name, const std::string& body) const {
        std::filesystem::create_directories(dir);
        std::ofstream f(dir / name, std::ios::binary);
        if (!f) throw DataError("cannot write " + (dir / name).string());
        f << body;
    }
    void json(const std::string& name, const Json& j) const { text(name, j.dump(2) + "\n"); }
    template <class Writer>
    void stream(const std::string& name, Writer&& w) const {
        std::ostringstream s;
        w(s);
        text(name, s.str());
    }
};

// ---------------------------------------------------------------- ode

int cmd_ode(const Config& c, const Output& out, std::ostream& log) {
    c.require_known({"profile", "psi", "eta", "lambda", "ymax", "tol"}, "ode");
    ProfileSpec spec = parse_profile_spec(c.text("profile", ""));
    if (c.has("psi")) spec.psi = ConvexProfile::parse(c.text("psi", ""));
    if (c.has("eta")) spec.eta = WeightField::parse(c.text("eta", ""));
    spec.lambda = c.real("lambda", spec.lambda);
    spec.y_max = c.real("ymax", spec.y_max);
    StepControl control;
    control.tolerance = c.real("tol", control.tolerance);

    const OdeProfile p = solve_profile(spec.psi, spec.eta, spec.lambda, spec.y_max, control);
    const SurjectivityReport s = surjectivity_diagnosis(p);
    double sup_k = 0.0;
    for (const auto& smp : p.samples) sup_k = std::max(sup_k, 0.5 * (smp.du + 1.0 / smp.du));

    out.stream("ode_table.csv", [&](std::ostream& o) { write_profile_csv(o, p); });
    Json j;
    j["psi"] = spec.psi.name();
    j["eta"] = spec.eta.name();
    j["lambda"] = spec.lambda;
    j["ymax"] = spec.y_max;
    j["branch"] = to_string(p.branch);
    j["M"] = p.limit.infinite ? Json("infinite") : number(p.limit.value);
    j["exhausted"] = p.exhausted;
    j["escaped"] = p.escaped;
    j["y_reached"] = p.y_reached();
    j["samples"] = p.samples.size();
    j["sup_distortion"] = number(sup_k);
    j["quasiconformal"] = s.quasiconformal;
    j["surjectivity"] = to_json(s);
    out.json("ode.json", j);
    log << "ode: " << to_string(s.verdict) << (p.exhausted ? " (range exhausted)" : "")
        << ", y reached " << p.y_reached() << "\n";
    return kExitOk;
}

// ---------------------------------------------------------------- map

int cmd_map(const Config& c, const Output& out, std::ostream& log) {
    c.require_known(with_grid({"map", "stencil_order"}), "map");
    const GridPtr grid = DomainGrid::build(grid_spec(c, 64));
    const MapSource src = parse_source(c.text("map", "identity"), *grid);
    const int order = stencil_order(c);

    const MappingField f = src.sample(grid);
    const FiniteDistortionReport r = finite_distortion_report(f, order);
    out.stream("map.csv", [&](std::ostream& o) { write_field_csv(o, f); });
    out.json("map.json", field_json(f, src.name()));
    Json j;
    j["map"] = src.name();
    j["nodes"] = r.node_count;
    j["degenerate_nodes"] = r.degenerate_count;
    j["degenerate_fraction"] = r.degenerate_fraction;
    j["jacobian_l1"] = number(r.jacobian_l1);
    j["k_ess_sup"] = number(r.k_ess_sup);
    j["finite_distortion"] = r.finite_distortion;
    j["verdict"] = r.verdict;
    out.json("map_report.json", j);
    log << "map " << src.name() << ": " << r.verdict << "\n";
    return kExitOk;
}

// ---------------------------------------------------------------- energy

int cmd_energy(const Config& c, const Output& out, std::ostream& log) {
    c.require_known(with_grid({"map", "psi", "weight", "inverse", "truncation", "stencil_order"}),
                    "energy");
    const GridPtr grid = DomainGrid::build(grid_spec(c, 64));
    const MapSource src = parse_source(c.text("map", "identity"), *grid);
    const ConvexProfile psi = ConvexProfile::parse(c.text("psi", "linear"));
    const WeightField w = WeightField::parse(c.text("weight", "unit"));
    const bool inverse = c.flag("inverse", false);
    const int order = stencil_order(c);
    std::vector<double> cuts;
    for (const auto& s : c.list("truncation", "")) {
        Config one;
        one.set("truncation", s);
        cuts.push_back(one.real("truncation", 0.0));
    }
    if (!cuts.empty() && grid->kind() != DomainKind::Disk)
        throw ConfigError("truncation applies to the disk domain");
    if (inverse && !src.closed) throw ConfigError("inverse needs a closed-form map");

    const MappingField f = src.sample(grid);
    const WirtingerField d = src.derivatives(f, order);
    const EnergyResult e = energy_direct(d, psi, w);

    Json j;
    j["map"] = src.name();
    j["psi"] = psi.name();
    j["weight"] = w.name();
    j["direct"] = {{"value", number(e.value)},
                   {"nodes_used", e.nodes_used},
                   {"degenerate_nodes", e.degenerate_nodes},
                   {"excluded_nodes", e.excluded_nodes},
                   {"excluded_area", e.excluded_area}};
    if (inverse) {
        const MappingField finv = sample_inverse(*src.closed, grid);
        const CovGap g = cov_gap(f, finv, psi, w);
        j["cov_gap"] = {{"gap", number(g.gap)},
                        {"direct", number(g.direct)},
                        {"inverse", number(g.inverse)},
                        {"inverse_consistency", number(g.inverse_consistency)}};
    }
    // Energies of the map and of the identity on the disk minus |z+1| < eps.
    Json trunc = Json::array();
    for (double eps : cuts) {
        std::vector<std::uint8_t> mask(grid->size(), 0);
        for (std::size_t k = 0; k < grid->size(); ++k)
            mask[k] = grid->inside(k) && std::abs(grid->node(k) + 1.0) >= eps;
        WirtingerField dm = d;
        for (std::size_t k = 0; k < grid->size(); ++k) dm.valid[k] = dm.valid[k] && mask[k];
        const WirtingerField did = identity_map().derivatives(grid, &mask);
        const double em = energy_direct(dm, psi, w).value;
        const double ei = energy_direct(did, psi, w).value;
        trunc.push_back({{"eps", eps},
                         {"energy", number(em)},
                         {"identity_energy", number(ei)},
                         {"gap", number(em - ei)}});
    }
    if (!cuts.empty()) j["truncations"] = trunc;
    out.json("energy.json", j);
    log << "energy " << src.name() << ": " << e.value << "\n";
    return kExitOk;
}

// ---------------------------------------------------------------- hopf

std::vector<int> resolutions(const Config& c) {
    std::vector<int> r;
    for (const auto& s : c.list("resolutions", "")) {
        Config one;
        one.set("resolutions", s);
        const long n = one.integer("resolutions", 0);
        if (n < 8 || n > 4096) throw ConfigError("resolutions must be in [8, 4096]");
        r.push_back(static_cast<int>(n));
    }
    return r;
}

HopfForm hopf_form(const Config& c) {
    const std::string f = c.text("form", "conjugated");
    if (f == "conjugated") return HopfForm::Conjugated;
    if (f == "unconjugated") return HopfForm::Unconjugated;
    throw ConfigError("form must be conjugated or unconjugated");
}

int cmd_hopf(const Config& c, const Output& out, std::ostream& log) {
    c.require_known(with_grid({"map", "psi", "weight", "form", "resolutions", "stencil_order"}),
                    "hopf");
    const DomainSpec spec = grid_spec(c, 64);
    const GridPtr grid = DomainGrid::build(spec);
    const MapSource src = parse_source(c.text("map", "identity"), *grid);
    const ConvexProfile psi = ConvexProfile::parse(c.text("psi", "linear"));
    const WeightField w = WeightField::parse(c.text("weight", "unit"));
    const HopfForm form = hopf_form(c);
    const std::vector<int> levels = resolutions(c);
    const int order = stencil_order(c);

    auto phi_on = [&](const GridPtr& g) {
        const MappingField f = src.sample(g);
        const WirtingerField d = src.derivatives(f, order);
        return hopf_differential(f, d, psi, w, form);
    };
    const QuadraticDifferentialField phi = phi_on(grid);
    const DbarReport dbar = dbar_residual(phi);

    std::vector<double> masses;
    Json l1j;
    if (levels.empty()) {
        masses.push_back(l1_mass(phi));
    } else {
        const L1MassReport l1 = l1_mass(
            [&](int n) {
                DomainSpec s = spec;
                s.resolution = n;
                return phi_on(DomainGrid::build(s));
            },
            levels);
        masses = l1.mass;
        l1j = {{"resolutions", l1.resolutions},
               {"divergent", l1.divergent},
               {"concentration_point", {l1.concentration_point.real(), l1.concentration_point.imag()}},
               {"concentration_share", number(l1.concentration_share)},
               {"verdict", l1.verdict}};
    }
    std::string verdict = dbar.holomorphic ? "holomorphic" : "not holomorphic";
    if (!l1j.is_null()) verdict += std::string("; L1 mass ") + l1j["verdict"].get<std::string>();

    out.stream("hopf.csv", [&](std::ostream& o) { write_field_csv(o, phi); });
    out.json("hopf.json", field_json(phi));
    out.json("hopf_residual.json", residual_json(dbar, masses, verdict));
    if (!l1j.is_null()) out.json("hopf_l1.json", l1j);
    log << "hopf " << src.name() << ": " << verdict << ", max dbar " << dbar.max_dbar << "\n";
    return kExitOk;
}

// ---------------------------------------------------------------- verify

// Small smooth quasiconformal perturbations of the identity.
const char* const kQcFamily = "identity;shear:0.1;shear:0.3;bump:0.1;bump:0.3;radial:0.2";

// Explicit `map` list, else `base` followed by `count` random maps.
std::vector<ClosedFormMap> battery_maps(const Config& c, const GridPtr& grid,
                                        const std::string& base, long count_default) {
    std::vector<ClosedFormMap> maps;
    if (c.has("map")) {
        for (const auto& s : split(c.text("map", ""), ';')) maps.push_back(parse_map(s, *grid));
        return maps;
    }
    for (const auto& s : split(base, ';')) maps.push_back(parse_map(s, *grid));
    const long count = c.integer("count", count_default);
    if (count < 0) throw ConfigError("count must be non-negative");
    if (count == 0) return maps;
    if (grid->kind() != DomainKind::Disk) throw ConfigError("random maps live on the disk domain");
    RandomMapGenerator gen(grid, static_cast<std::uint64_t>(c.integer("seed", 1)),
                           static_cast<int>(c.integer("levels", 3)));
    for (long i = 0; i < count; ++i) maps.push_back(gen.next());
    return maps;
}

std::vector<HolomorphicDifferential> battery_phis(const Config& c) {
    std::vector<HolomorphicDifferential> phis;
    for (const auto& s : c.list("phi", "1,w,w2,1+w3")) phis.push_back(parse_differential(s));
    return phis;
}

InequalityReport degenerate_report(const std::string& name, const DegeneracyError& e,
                                   std::size_t nodes) {
    InequalityReport r;
    r.inequality = name;
    r.degenerate_nodes = static_cast<std::size_t>(std::llround(e.fraction() * nodes));
    r.hypothesis_violations = r.degenerate_nodes;
    r.holds = false;
    r.verdict = std::string("hypothesis violated: orientation (") + e.what() + ")";
    return r;
}

int cmd_verify(const Config& c, const Output& out, std::ostream& log) {
    c.require_known(with_grid({"battery", "count", "seed", "levels", "phi", "psi", "weight", "map",
                               "competitor", "tol"}),
                    "verify");
    const std::string battery = c.text("battery", "");
    if (battery != "rs" && battery != "pointwise" && battery != "gap" && battery != "invariance")
        throw ConfigError("battery must be one of rs, pointwise, gap, invariance");
    const GridPtr grid = DomainGrid::build(grid_spec(c, battery == "invariance" ? 256 : 128));
    const ConvexProfile psi = ConvexProfile::parse(c.text("psi", "power:2"));
    const WeightField w = WeightField::parse(c.text("weight", "unit"));
    const std::vector<HolomorphicDifferential> phis = battery_phis(c);
    std::vector<std::string> competitors = split(c.text("competitor", ""), ';');
    for (const auto& s : competitors)
        if (s != "self") parse_map(s, *grid);

    Json reports = Json::array();
    std::size_t failed = 0;
    auto record = [&](Json entry, bool holds) {
        if (!holds) ++failed;
        reports.push_back(std::move(entry));
    };

    if (battery == "rs" || battery == "pointwise") {
        const double tol = c.real("tol", 1e-9);
        const std::vector<ClosedFormMap> maps =
            battery_maps(c, grid, "identity", battery == "rs" ? 200 : 20);
        for (const auto& f : maps) {
            const MappingField fs = f.sample(grid);
            const WirtingerField df = f.derivatives(grid);
            for (const auto& phi : phis) {
                if (battery == "rs") {
                    InequalityReport r;
                    try {
                        r = rs_sides(fs, df, phi, tol);
                    } catch (const DegeneracyError& e) {
                        r = degenerate_report("reich-strebel", e, grid->inside_count());
                    }
                    Json j = {{"map", f.name}, {"phi", phi.name}};
                    j.update(to_json(r));
                    record(j, r.holds);
                    continue;
                }
                for (const auto* g : {&f, static_cast<const ClosedFormMap*>(nullptr)}) {
                    const ClosedFormMap gm = g ? *g : identity_map();
                    InequalityReport r;
                    try {
                        r = pointwise_teich(fs, df, gm.derivatives(grid), phi, tol);
                    } catch (const DegeneracyError& e) {
                        r = degenerate_report("pointwise teichmueller", e, grid->inside_count());
                    }
                    Json j = {{"f", f.name}, {"g", gm.name}, {"phi", phi.name}};
                    j.update(to_json(r));
                    record(j, r.holds);
                }
            }
        }
    } else if (battery == "gap") {
        const ClosedFormMap h = parse_map(c.text("map", "identity"), *grid);
        const MappingField hs = h.sample(grid);
        std::vector<ClosedFormMap> Hs;
        if (competitors.empty()) {
            Hs.push_back(h);
            RandomMapGenerator gen(grid, static_cast<std::uint64_t>(c.integer("seed", 1)),
                                   static_cast<int>(c.integer("levels", 3)));
            for (long i = 0, n = c.integer("count", 5); i < n; ++i) Hs.push_back(gen.next());
        } else {
            for (const auto& s : competitors) Hs.push_back(s == "self" ? h : parse_map(s, *grid));
        }
        for (const auto& H : Hs) {
            const UniquenessReport u = uniqueness_verdict(hs, H.sample(grid), psi, w);
            Json j = {{"h", h.name}, {"H", H.name}, {"uniqueness", u.verdict},
                      {"coincide", u.coincide}};
            j.update(to_json(u.gap));
            record(j, u.gap.bound_holds);
        }
    } else {
        const double tol = c.real("tol", 1e-4);
        if (grid->kind() != DomainKind::Disk)
            throw ConfigError("the invariance battery runs on the disk domain");
        const std::vector<ClosedFormMap> maps = battery_maps(c, grid, kQcFamily, 0);
        const std::vector<MobiusParams> ms = {
            {{0.3, 0.0}, 0.0}, {{-0.2, 0.4}, 1.0}, {{0.0, 0.5}, 2.5}};
        for (const auto& f : maps) {
            const MappingField fs = f.sample(grid);
            for (const auto& m : ms) {
                const double gap = mobius_invariance_gap(fs, psi, m);
                const bool holds = gap <= tol;
                record({{"map", f.name},
                        {"a", {m.a.real(), m.a.imag()}},
                        {"theta", m.theta},
                        {"gap", number(gap)},
                        {"tolerance", tol},
                        {"holds", holds},
                        {"verdict", holds ? "invariant" : "not invariant"}},
                       holds);
            }
        }
    }
    out.json("verify_" + battery + ".json", reports);
    log << "verify " << battery << ": " << reports.size() - failed << "/" << reports.size()
        << " hold\n";
    return failed == 0 ? kExitOk : kExitVerdict;
}

// ---------------------------------------------------------------- minimize

int cmd_minimize(const Config& c, const Output& out, std::ostream& log) {
    c.require_known(with_grid({"start", "boundary", "psi", "weight", "grad_tol", "j_floor",
                               "max_iter", "levels", "delta", "mode"}),
                    "minimize");
    const GridPtr grid = DomainGrid::build(grid_spec(c, 64));
    const MapSource start = parse_source(c.text("start", "bump:0.05"), *grid);
    std::optional<MapSource> boundary;
    if (c.has("boundary")) boundary = parse_source(c.text("boundary", ""), *grid);
    const ConvexProfile psi = ConvexProfile::parse(c.text("psi", "power:2"));
    const WeightField w = WeightField::parse(c.text("weight", "unit"));
    MinimizeOptions opt;
    opt.grad_tol = c.real("grad_tol", opt.grad_tol);
    opt.j_floor = c.real("j_floor", opt.j_floor);
    opt.max_sweeps = static_cast<int>(c.integer("max_iter", opt.max_sweeps));
    opt.basis_levels = static_cast<int>(c.integer("levels", opt.basis_levels));
    opt.delta = c.real("delta", opt.delta);
    const std::string mode = c.text("mode", "descent");
    if (mode != "descent" && mode != "stationarity")
        throw ConfigError("mode must be descent or stationarity");
    if (opt.max_sweeps < 0 || opt.basis_levels < 1) throw ConfigError("bad minimizer options");

    const MappingField f0 = start.sample(grid);
    const BumpBasis basis = BumpBasis::dyadic(*grid, opt.basis_levels);
    Json j;
    j["start"] = start.name();
    j["psi"] = psi.name();
    j["weight"] = w.name();
    if (mode == "stationarity") {
        const StationarityReport s =
            stationarity_vs_holomorphy(f0, psi, w, basis, opt.grad_tol, opt.delta);
        j["stationarity"] = to_json(s);
        out.json("minimize.json", j);
        log << "stationarity: " << (s.stationary ? "stationary" : "not stationary") << ", "
            << (s.holomorphic ? "holomorphic" : "not holomorphic") << "\n";
        return kExitOk;
    }

    const std::vector<cplx> trace =
        boundary ? boundary->sample(grid).boundary_trace() : f0.boundary_trace();
    const MinimizeResult res = minimize(trace, f0, psi, w, opt);
    const StationarityReport s =
        stationarity_vs_holomorphy(res.map, psi, w, basis, opt.grad_tol, opt.delta);

    double min_j = std::numeric_limits<double>::infinity();
    for (const auto& st : res.trace.steps) min_j = std::min(min_j, st.min_jacobian);
    out.stream("minimize_field.csv", [&](std::ostream& o) { write_field_csv(o, res.map); });
    out.stream("minimize_trace.csv", [&](std::ostream& o) { write_trace_csv(o, res.trace); });
    j["termination"] = res.trace.termination;
    j["sweeps"] = res.trace.sweeps;
    j["steps"] = res.trace.steps.size();
    j["energy_start"] = number(res.trace.steps.front().energy);
    j["energy_end"] = number(res.trace.steps.back().energy);
    j["dbar_start"] = number(res.trace.steps.front().dbar);
    j["dbar_end"] = number(res.trace.steps.back().dbar);
    j["min_jacobian"] = number(min_j);
    j["max_derivative"] = number(res.trace.max_derivative);
    j["stationarity"] = to_json(s);
    out.json("minimize.json", j);
    log << "minimize: " << res.trace.termination << " after " << res.trace.sweeps
        << " sweeps, energy " << res.trace.steps.back().energy << "\n";
    return kExitOk;
}

// ---------------------------------------------------------------- export

int cmd_export(const Config& c, const Output& out, std::ostream& log) {
    c.require_known(with_grid({"map", "psi", "weight", "form", "stencil_order"}), "export");
    const GridPtr grid = DomainGrid::build(grid_spec(c, 64));
    const MapSource src = parse_source(c.text("map", "identity"), *grid);
    const ConvexProfile psi = ConvexProfile::parse(c.text("psi", "linear"));
    const WeightField w = WeightField::parse(c.text("weight", "unit"));
    const HopfForm form = hopf_form(c);
    const int order = stencil_order(c);

    const MappingField f = src.sample(grid);
    const WirtingerField d = src.derivatives(f, order);
    const DistortionField K = distortion(d);
    const BeltramiField mu = beltrami(d);
    const QuadraticDifferentialField phi = hopf_differential(f, d, psi, w, form);

    auto cell = [](double v) {
        std::ostringstream s;
        s.precision(17);
        if (std::isfinite(v)) s << v;
        else s << "nan";
        return s.str();
    };
    out.stream("export.csv", [&](std::ostream& o) {
        o << "index,x,y,re,im,jacobian,distortion,mu_re,mu_im,phi_re,phi_im\n";
        const double q = std::numeric_limits<double>::quiet_NaN();
        for (std::size_t k = 0; k < grid->size(); ++k) {
            if (!f.active(k)) continue;
            const cplx z = grid->node(k);
            const bool ok = d.ok(k);
            const cplx m = ok && mu.valid[k] ? mu.mu[k] : cplx{q, q};
            const cplx p = phi.valid[k] ? phi.phi[k] : cplx{q, q};
            o << k << ',' << cell(z.real()) << ',' << cell(z.imag()) << ',' << cell(f[k].real())
              << ',' << cell(f[k].imag()) << ',' << cell(ok ? d.jacobian[k] : q) << ','
              << cell(K.defined[k] ? K.K[k] : q) << ',' << cell(m.real()) << ','
              << cell(m.imag()) << ',' << cell(p.real()) << ',' << cell(p.imag()) << '\n';
        }
    });
    log << "export " << src.name() << ": " << f.active_count() << " nodes\n";
    return kExitOk;
}

struct Command {
    const char* name;
    const char* help;
    int (*run)(const Config&, const Output&, std::ostream&);
};

const Command kCommands[] = {
    {"ode", "solve the separable profile equation", cmd_ode},
    {"map", "sample a map and report its distortion", cmd_map},
    {"energy", "distortion energy, change-of-variables gap, truncations", cmd_energy},
    {"hopf", "Ahlfors-Hopf differential, holomorphy and L1 mass", cmd_hopf},
    {"verify", "run an inequality battery (rs | pointwise | gap | invariance)", cmd_verify},
    {"minimize", "inner-variation descent with fixed boundary values", cmd_minimize},
    {"export", "plot-ready node table of a map", cmd_export},
};

int exit_code_for(const Error& e) {
    if (dynamic_cast<const ConfigError*>(&e)) return kExitUsage;
    return kExitData;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Distortion-energy toolkit for planar mappings of finite distortion"};
    app.require_subcommand(1);
    std::string config_path;
    std::string out_dir = "out";
    std::optional<long> seed;
    std::optional<long> grid;
    for (const auto& cmd : kCommands) {
        CLI::App* sub = app.add_subcommand(cmd.name, cmd.help);
        sub->add_option("--config", config_path, "key=value configuration file");
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--seed", seed, "random seed (overrides the config)");
        sub->add_option("--grid", grid, "grid resolution (overrides the config)");
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }
    const std::string name = app.get_subcommands().front()->get_name();
    const Command* cmd = nullptr;
    for (const auto& c : kCommands)
        if (name == c.name) cmd = &c;

    try {
        Config cfg = config_path.empty() ? Config{} : Config::parse_file(config_path);
        if (seed) cfg.override_with("seed", std::to_string(*seed));
        if (grid) cfg.override_with("grid", std::to_string(*grid));
        return cmd->run(cfg, Output{out_dir}, out);
    } catch (const Error& e) {
        err << name << ": " << e.what() << "\n";
        return exit_code_for(e);
    } catch (const std::exception& e) {
        err << name << ": " << e.what() << "\n";
        return kExitData;
    }
}

}  // namespace mfd::cli
