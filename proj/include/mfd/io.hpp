#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "mfd/fields.hpp"
#include "mfd/hopf.hpp"
#include "mfd/minimizer.hpp"
#include "mfd/ode.hpp"
#include "mfd/reich_strebel.hpp"

namespace mfd {

using Json = nlohmann::ordered_json;

// Field files hold one record per active node: index, x, y, re, im.
void write_field_csv(std::ostream& out, const DomainGrid& grid, const std::vector<cplx>& values,
                     const std::vector<std::uint8_t>& active);
void write_field_csv(std::ostream& out, const MappingField& f);
void write_field_csv(std::ostream& out, const QuadraticDifferentialField& phi);

// Reads a field CSV written for `grid`; nodes without a record are inactive.
// DataError on malformed rows or indices/coordinates that do not match.
MappingField read_field_csv(std::istream& in, GridPtr grid);

Json grid_json(const DomainGrid& grid);
DomainSpec grid_spec_from_json(const Json& j);

// {"grid": {...}, "role": ..., "tag": ..., "nodes": [[index, x, y, re, im], ...]}
Json field_json(const MappingField& f, const std::string& tag = "");
Json field_json(const QuadraticDifferentialField& phi);
MappingField field_from_json(const Json& j);

// y, u, du, K, residual with residual = |F(u') eta(u) - 4 lambda|.
void write_profile_csv(std::ostream& out, const OdeProfile& profile);

void write_trace_csv(std::ostream& out, const DescentTrace& trace);

// {max_dbar, mean_value_gap, l1_levels[], verdict}
Json residual_json(const DbarReport& dbar, const std::vector<double>& l1_levels,
                   const std::string& verdict);

Json to_json(const InequalityReport& r);
Json to_json(const EnergyGapReport& r);
Json to_json(const SurjectivityReport& r);
Json to_json(const StationarityReport& r);

// Finite doubles as numbers, everything else as null.
Json number(double v);

}  // namespace mfd
