#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mfd/error.hpp"
#include "mfd/io.hpp"
#include "mfd/maps.hpp"
#include "mfd/reich_strebel.hpp"

using namespace mfd;

namespace {

GridPtr disk(int n) { return DomainGrid::build(DomainSpec::disk(n)); }

std::string csv_of(const MappingField& f) {
    std::ostringstream os;
    write_field_csv(os, f);
    return os.str();
}

MappingField read(const std::string& text, GridPtr g) {
    std::istringstream is(text);
    return read_field_csv(is, g);
}

}  // namespace

TEST(FieldCsv, RoundTripIsBitExact) {
    const auto g = disk(32);
    const auto f = RandomMapGenerator(g, 4).next().sample(g);
    const std::string text = csv_of(f);
    EXPECT_EQ(text.substr(0, text.find('\n')), "index,x,y,re,im");
    const auto back = read(text, g);
    for (std::size_t k = 0; k < g->size(); ++k) {
        EXPECT_EQ(back.active(k), f.active(k));
        if (f.active(k)) { EXPECT_EQ(back[k], f[k]); }
    }
    EXPECT_EQ(csv_of(back), text);
}

TEST(FieldCsv, OnlyActiveNodesAreWritten) {
    const auto g = disk(16);
    const auto f = identity_map().sample(g);
    const std::string text = csv_of(f);
    const auto lines = std::count(text.begin(), text.end(), '\n');
    EXPECT_EQ(static_cast<std::size_t>(lines), g->inside_count() + 1);
}

TEST(FieldCsv, MalformedInput) {
    const auto g = disk(16);
    const std::string good = csv_of(identity_map().sample(g));
    const std::size_t first = good.find('\n') + 1;
    const std::size_t second = good.find('\n', first) + 1;
    const std::string header = good.substr(0, first);
    const std::string row = good.substr(first, second - first);

    EXPECT_THROW(read("idx,x,y,re,im\n" + row, g), DataError);
    EXPECT_THROW(read(header + "1,2,3\n", g), DataError);
    EXPECT_THROW(read(header + "100000,0,0,0,0\n", g), DataError);
    EXPECT_THROW(read(header + row + row, g), DataError);
    EXPECT_THROW(read(header + "abc,0,0,0,0\n", g), DataError);
    // Coordinates that do not belong to the index.
    std::string shifted = row;
    shifted.replace(shifted.find(',') + 1, 1, "9");
    EXPECT_THROW(read(header + shifted, g), DataError);
    // A corner node lies outside the disk.
    std::ostringstream corner;
    corner << header << "0," << g->node(0).real() << "," << g->node(0).imag() << ",0,0\n";
    EXPECT_THROW(read(corner.str(), g), DataError);
    std::string nan_row = row.substr(0, row.rfind(',')) + ",nan\n";
    EXPECT_THROW(read(header + nan_row, g), DataError);
}

TEST(FieldJson, RoundTrip) {
    const auto g = DomainGrid::build(DomainSpec::half_plane(16, 3.0, 0.1, 2.0));
    const auto f = linear_stretch(2.0).sample(g);
    const Json j = field_json(f, "stretch");
    EXPECT_EQ(j["role"], "map");
    EXPECT_EQ(j["tag"], "stretch");
    EXPECT_EQ(j["grid"]["kind"], "half-plane");
    const auto back = field_from_json(Json::parse(j.dump()));
    ASSERT_EQ(back.grid().size(), g->size());
    for (std::size_t k = 0; k < g->size(); ++k) EXPECT_EQ(back[k], f[k]);
    EXPECT_EQ(field_json(back, "stretch").dump(), j.dump());
}

TEST(GridJson, RoundTrip) {
    for (const auto& spec : {DomainSpec::disk(64), DomainSpec::half_plane(32, 20.0, 1e-3, 20.0),
                             DomainSpec::rectangle(8, {0.0, 1.0, 0.0, 2.0})}) {
        const auto g = DomainGrid::build(spec);
        const auto s = grid_spec_from_json(grid_json(*g));
        const auto g2 = DomainGrid::build(s);
        EXPECT_EQ(g2->kind(), g->kind());
        EXPECT_EQ(g2->n(), g->n());
        EXPECT_EQ(g2->box().x0, g->box().x0);
        EXPECT_EQ(g2->box().y1, g->box().y1);
    }
    EXPECT_THROW(grid_spec_from_json(Json::parse(R"({"kind":"torus","n":8})")), DataError);
}

TEST(Reports, NonFiniteBecomesNull) {
    EXPECT_TRUE(number(NAN).is_null());
    EXPECT_TRUE(number(INFINITY).is_null());
    EXPECT_EQ(number(0.5).get<double>(), 0.5);
    DbarReport d;
    d.max_dbar = 1e-3;
    const Json r = residual_json(d, {1.0, 2.0, INFINITY}, "bounded");
    EXPECT_EQ(r["verdict"], "bounded");
    EXPECT_TRUE(r["l1_levels"][2].is_null());
}

TEST(Reports, InequalityFields) {
    const auto g = disk(32);
    const auto id = identity_map();
    const auto rep = rs_sides(id.sample(g), id.derivatives(g), parse_differential("1"));
    const Json j = to_json(rep);
    for (const char* key : {"lhs", "rhs", "slack", "holds", "verdict", "boundary_gap"})
        EXPECT_TRUE(j.contains(key)) << key;
    EXPECT_EQ(j["holds"], true);
}

TEST(ProfileCsv, HeaderAndResidual) {
    const auto p = solve_profile(ConvexProfile::power(2), WeightField::hyperbolic_half_plane(), 1.0, 10.0);
    std::ostringstream os;
    write_profile_csv(os, p);
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    EXPECT_EQ(line, "y,u,du,K,residual");
    std::size_t rows = 0;
    while (std::getline(is, line)) {
        ++rows;
        const double residual = std::stod(line.substr(line.rfind(',') + 1));
        EXPECT_LE(residual, 1e-8);
    }
    EXPECT_EQ(rows, p.samples.size());
}

TEST(TraceCsv, Header) {
    DescentTrace t;
    t.steps.push_back({0, 0, 3.0, 0.0, 0, 1.0, 0.5});
    std::ostringstream os;
    write_trace_csv(os, t);
    EXPECT_EQ(os.str().substr(0, os.str().find('\n')), "iter,energy,minJ,dbar,sweep,step,basis_index");
}
