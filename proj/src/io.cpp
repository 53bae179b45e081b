#include "mfd/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>

#include "mfd/error.hpp"

namespace mfd {

namespace {

// Shortest decimal form that reads back to the same double.
std::string fmt(double v) {
    if (!std::isfinite(v)) return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
    char buf[32];
    for (int prec = 15; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

double parse_double(const std::string& s, std::size_t line) {
    try {
        std::size_t used = 0;
        double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw DataError("line " + std::to_string(line) + ": bad number '" + s + "'");
    }
}

}  // namespace

Json number(double v) {
    if (!std::isfinite(v)) return nullptr;
    return v;
}

void write_field_csv(std::ostream& out, const DomainGrid& grid, const std::vector<cplx>& values,
                     const std::vector<std::uint8_t>& active) {
    out << "index,x,y,re,im\n";
    for (std::size_t k = 0; k < grid.size(); ++k) {
        if (!active[k]) continue;
        cplx z = grid.node(k);
        out << k << ',' << fmt(z.real()) << ',' << fmt(z.imag()) << ',' << fmt(values[k].real())
            << ',' << fmt(values[k].imag()) << '\n';
    }
}

void write_field_csv(std::ostream& out, const MappingField& f) {
    std::vector<cplx> v(f.values().begin(), f.values().end());
    write_field_csv(out, f.grid(), v, f.active_mask());
}

void write_field_csv(std::ostream& out, const QuadraticDifferentialField& phi) {
    write_field_csv(out, *phi.grid, phi.phi, phi.valid);
}

MappingField read_field_csv(std::istream& in, GridPtr grid) {
    std::string line;
    if (!std::getline(in, line) || line != "index,x,y,re,im")
        throw DataError("field CSV: expected header 'index,x,y,re,im'");
    std::vector<cplx> values(grid->size(), cplx{0.0, 0.0});
    std::vector<std::uint8_t> active(grid->size(), 0);
    const double tol = 1e-9 * (1.0 + grid->spacing());
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        for (std::string c; std::getline(ss, c, ',');) cells.push_back(c);
        if (cells.size() != 5)
            throw DataError("line " + std::to_string(lineno) + ": expected 5 columns");
        double kd = parse_double(cells[0], lineno);
        if (kd < 0 || kd != std::floor(kd) || kd >= static_cast<double>(grid->size()))
            throw DataError("line " + std::to_string(lineno) + ": index out of range");
        auto k = static_cast<std::size_t>(kd);
        cplx z = grid->node(k);
        if (std::abs(parse_double(cells[1], lineno) - z.real()) > tol ||
            std::abs(parse_double(cells[2], lineno) - z.imag()) > tol)
            throw DataError("line " + std::to_string(lineno) + ": coordinates do not match the grid");
        if (!grid->inside(k))
            throw DataError("line " + std::to_string(lineno) + ": node outside the domain");
        if (active[k]) throw DataError("line " + std::to_string(lineno) + ": duplicate index");
        values[k] = {parse_double(cells[3], lineno), parse_double(cells[4], lineno)};
        if (!std::isfinite(values[k].real()) || !std::isfinite(values[k].imag()))
            throw DataError("line " + std::to_string(lineno) + ": non-finite value");
        active[k] = 1;
    }
    return MappingField(std::move(grid), std::move(values), std::move(active));
}

Json grid_json(const DomainGrid& grid) {
    const Box& b = grid.box();
    Json j;
    j["kind"] = to_string(grid.kind());
    j["n"] = grid.n();
    j["extents"] = {{"x0", b.x0}, {"x1", b.x1}, {"y0", b.y0}, {"y1", b.y1}};
    return j;
}

DomainSpec grid_spec_from_json(const Json& j) {
    try {
        DomainKind kind = parse_domain_kind(j.at("kind").get<std::string>());
        int n = j.at("n").get<int>();
        const Json& e = j.at("extents");
        Box b{e.at("x0").get<double>(), e.at("x1").get<double>(), e.at("y0").get<double>(),
              e.at("y1").get<double>()};
        switch (kind) {
            case DomainKind::Disk: return DomainSpec::disk(n);
            case DomainKind::HalfPlane:
                return DomainSpec::half_plane(n, 0.5 * (b.x1 - b.x0), b.y0, b.y1);
            case DomainKind::Rectangle: return DomainSpec::rectangle(n, b);
        }
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("grid metadata: ") + e.what());
    } catch (const ConfigError& e) {
        throw DataError(std::string("grid metadata: ") + e.what());
    }
    throw DataError("grid metadata: unknown kind");
}

namespace {

Json nodes_json(const DomainGrid& grid, const std::vector<cplx>& v,
                const std::vector<std::uint8_t>& active) {
    Json nodes = Json::array();
    for (std::size_t k = 0; k < grid.size(); ++k) {
        if (!active[k]) continue;
        cplx z = grid.node(k);
        nodes.push_back({k, z.real(), z.imag(), v[k].real(), v[k].imag()});
    }
    return nodes;
}

}  // namespace

Json field_json(const MappingField& f, const std::string& tag) {
    Json j;
    j["grid"] = grid_json(f.grid());
    j["role"] = "map";
    j["tag"] = tag;
    std::vector<cplx> v(f.values().begin(), f.values().end());
    j["nodes"] = nodes_json(f.grid(), v, f.active_mask());
    return j;
}

Json field_json(const QuadraticDifferentialField& phi) {
    Json j;
    j["grid"] = grid_json(*phi.grid);
    j["role"] = phi.role;
    j["tag"] = phi.weight_tag;
    j["nodes"] = nodes_json(*phi.grid, phi.phi, phi.valid);
    return j;
}

MappingField field_from_json(const Json& j) {
    GridPtr grid = DomainGrid::build(grid_spec_from_json(j.at("grid")));
    std::vector<cplx> values(grid->size(), cplx{0.0, 0.0});
    std::vector<std::uint8_t> active(grid->size(), 0);
    try {
        for (const auto& rec : j.at("nodes")) {
            auto k = rec.at(0).get<std::size_t>();
            if (k >= grid->size() || !grid->inside(k)) throw DataError("field JSON: bad node index");
            values[k] = {rec.at(3).get<double>(), rec.at(4).get<double>()};
            active[k] = 1;
        }
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("field JSON: ") + e.what());
    }
    return MappingField(std::move(grid), std::move(values), std::move(active));
}

void write_profile_csv(std::ostream& out, const OdeProfile& p) {
    out << "y,u,du,K,residual\n";
    for (const auto& s : p.samples) {
        double eta = p.eta(cplx{0.0, s.u});
        double res = std::abs(stretch_density(p.psi, s.du) * eta - 4.0 * p.lambda);
        // eta blows up at the real axis on the hyperbolic weight; the ODE
        // there is the limit u' = 1.
        if (!std::isfinite(eta)) res = std::abs(s.du - 1.0);
        double K = 0.5 * (s.du + 1.0 / s.du);
        out << fmt(s.y) << ',' << fmt(s.u) << ',' << fmt(s.du) << ',' << fmt(K) << ','
            << fmt(res) << '\n';
    }
}

void write_trace_csv(std::ostream& out, const DescentTrace& trace) {
    out << "iter,energy,minJ,dbar,sweep,step,basis_index\n";
    for (const auto& s : trace.steps) {
        out << s.iteration << ',' << fmt(s.energy) << ',' << fmt(s.min_jacobian) << ','
            << fmt(s.dbar) << ',' << s.sweep << ',' << fmt(s.step) << ',' << s.basis_index << '\n';
    }
}

Json residual_json(const DbarReport& dbar, const std::vector<double>& l1_levels,
                   const std::string& verdict) {
    Json j;
    j["max_dbar"] = number(dbar.max_dbar);
    j["mean_value_gap"] = number(dbar.mean_value_gap);
    Json levels = Json::array();
    for (double m : l1_levels) levels.push_back(number(m));
    j["l1_levels"] = levels;
    j["verdict"] = verdict;
    return j;
}

namespace {

Json dbar_json(const DbarReport& d) {
    return {{"max_dbar", number(d.max_dbar)},
            {"mean_value_gap", number(d.mean_value_gap)},
            {"truncation_estimate", number(d.truncation_estimate)},
            {"threshold", number(d.threshold)},
            {"holomorphic", d.holomorphic},
            {"nodes", d.nodes},
            {"failing_nodes", d.failing_nodes}};
}

}  // namespace

Json to_json(const InequalityReport& r) {
    Json j;
    j["inequality"] = r.inequality;
    j["lhs"] = number(r.lhs);
    j["rhs"] = number(r.rhs);
    j["slack"] = number(r.slack);
    j["worst_node_slack"] = number(r.worst_node_slack);
    j["worst_node"] = r.worst_node;
    Json terms = Json::object();
    for (const auto& t : r.terms) terms[t.name] = number(t.value);
    j["terms"] = terms;
    j["boundary_gap"] = number(r.boundary_gap);
    j["phi_dbar"] = number(r.phi_dbar);
    j["phi_holomorphic"] = r.phi_holomorphic;
    j["phi_l1"] = number(r.phi_l1);
    j["excluded_area"] = number(r.excluded_area);
    j["degenerate_nodes"] = r.degenerate_nodes;
    j["hypothesis_violations"] = r.hypothesis_violations;
    j["tolerance"] = r.tolerance;
    j["holds"] = r.holds;
    j["verdict"] = r.verdict;
    return j;
}

Json to_json(const EnergyGapReport& r) {
    Json j;
    j["gap"] = number(r.gap);
    j["pulled_gap"] = number(r.pulled_gap);
    j["term1"] = number(r.term1);
    j["term2"] = number(r.term2);
    j["energy_h"] = number(r.energy_h);
    j["energy_H"] = number(r.energy_H);
    j["tolerance"] = number(r.tolerance);
    j["inversion_residual"] = number(r.inversion_residual);
    j["boundary_mismatch"] = number(r.boundary_mismatch);
    j["max_xi_zbar"] = number(r.max_xi_zbar);
    j["max_xi_displacement"] = number(r.max_xi_displacement);
    j["identity_mismatch"] = number(r.identity_mismatch);
    j["convexity_violations"] = r.convexity_violations;
    j["negative_term1_nodes"] = r.negative_term1_nodes;
    j["nodes"] = r.nodes;
    j["skipped_nodes"] = r.skipped_nodes;
    j["phi_dbar"] = dbar_json(r.phi_dbar);
    j["phi_l1"] = number(r.phi_l1);
    j["certified"] = r.certified;
    j["bound_holds"] = r.bound_holds;
    j["verdict"] = r.verdict;
    return j;
}

Json to_json(const SurjectivityReport& r) {
    Json j;
    j["verdict"] = to_string(r.verdict);
    j["horizon"] = number(r.horizon);
    Json tails = Json::array();
    for (double t : r.tail_integrals) tails.push_back(number(t));
    j["tail_integrals"] = tails;
    j["tail_exponent"] = number(r.tail_exponent);
    j["tail_exponent_previous"] = number(r.tail_exponent_previous);
    j["u_end"] = number(r.u_end);
    j["trajectory_exponent"] = number(r.trajectory_exponent);
    j["eta_psi_proxy"] = number(r.eta_psi_proxy);
    j["quasiconformal"] = r.quasiconformal;
    j["distortion_end"] = number(r.distortion_end);
    return j;
}

Json to_json(const StationarityReport& r) {
    Json j;
    j["max_derivative"] = number(r.max_derivative);
    j["argmax"] = r.argmax;
    j["derivative_threshold"] = number(r.derivative_threshold);
    j["dbar"] = dbar_json(r.dbar);
    j["stationary"] = r.stationary;
    j["holomorphic"] = r.holomorphic;
    j["consistent"] = r.consistent;
    return j;
}

}  // namespace mfd
