#include <doctest.h>

#include "hpq/blocks.hpp"
#include "hpq/capon.hpp"

using namespace hpq;

namespace {

// Figure-3-style product family: x-sides fixed per column, y high-frequency
BlockFamily product_family() {
    BlockFamily fam(3);
    const DyadicInterval unit = DyadicInterval::unit();
    fam.add_block(DyadicRectangle::unit(), {{DyadicRectangle::unit(), 1.0}});
    // B_{[0,1/2) x [0,1]}: x-sides are the two level-2 tiles of [0,1/2)
    fam.add_block({{1, 0}, unit},
                  {{{{2, 0}, unit}, 1.0}, {{{2, 1}, unit}, 1.0}});
    fam.add_block({{1, 1}, unit},
                  {{{{2, 2}, unit}, 1.0}, {{{2, 3}, unit}, 1.0}});
    // B_{[0,1] x [0,1/2)}: y-sides tile [0,1/2) at level 2
    fam.add_block({unit, {1, 0}},
                  {{{unit, {2, 0}}, 1.0}, {{unit, {2, 1}}, 1.0}});
    fam.add_block({unit, {1, 1}},
                  {{{unit, {2, 2}}, 1.0}, {{unit, {2, 3}}, 1.0}});
    // B_{[0,1/2) x [0,1/2)}: x-sides kept intact, y refined to level 3
    std::vector<BlockMember> interior;
    for (std::int64_t jx : {0, 1})
        for (std::int64_t jy : {0, 1, 2, 3})
            interior.push_back({{{2, jx}, {3, jy}}, 1.0});
    fam.add_block({{1, 0}, {1, 0}}, interior);
    return fam;
}

// Figure-4-style fragmentation: same region covered, x-sides inconsistent
BlockFamily fragmented_family() {
    BlockFamily fam(3);
    const DyadicInterval unit = DyadicInterval::unit();
    fam.add_block(DyadicRectangle::unit(), {{DyadicRectangle::unit(), 1.0}});
    fam.add_block({{1, 0}, unit},
                  {{{{2, 0}, unit}, 1.0}, {{{2, 1}, unit}, 1.0}});
    // same x-index [0,1/2) but a different J: x-sides now at level 3
    std::vector<BlockMember> bad;
    for (std::int64_t jx : {0, 1, 2, 3})
        for (std::int64_t jy : {0, 1})
            bad.push_back({{{3, jx}, {2, jy}}, 1.0});
    fam.add_block({{1, 0}, {1, 0}}, bad);
    return fam;
}

}  // namespace

TEST_CASE("trivial structure passes with constants exactly 1") {
    const CaponStructure s = trivial_structure(3);
    const CaponReport rep = check(s);
    CHECK(rep.ok);
    CHECK(rep.c_x.is_one());
    CHECK(rep.c_y.is_one());
    CHECK(rep.uncovered_cells.empty());
}

TEST_CASE("derived sets") {
    const CaponStructure s = trivial_structure(2);
    // trivial structure: both sets equal J for every x
    const DyadicInterval j{1, 0};
    for (std::int64_t x = 0; x < 4; ++x) {
        const auto [small, large] = derived_sets(s, j, x);
        CHECK(small == CellSet::from_interval(j, 2));
        CHECK(large == CellSet::from_interval(j, 2));
    }
    // x covered by no keyed K: full intersection, empty union
    CaponStructure partial;
    partial.depth = 2;
    partial.x_families[DyadicInterval::unit()] = {DyadicInterval{1, 0}};
    partial.y_families[{DyadicInterval::unit(), DyadicInterval{1, 0}}] = {
        DyadicInterval::unit()};
    const auto [small, large] = derived_sets(partial, DyadicInterval::unit(), 3);
    CHECK(small == CellSet::full(2));
    CHECK(large.none());
}

TEST_CASE("structure with uncovered half is flagged through X conditions") {
    // X_{[0,1)} covers only the left half, children cover their own intervals:
    // the X3 inclusion fails for the right child
    CaponStructure s;
    s.depth = 2;
    s.x_families[DyadicInterval::unit()] = {DyadicInterval{1, 0}};
    s.x_families[{1, 0}] = {DyadicInterval{2, 0}, DyadicInterval{2, 1}};
    s.x_families[{1, 1}] = {DyadicInterval{2, 2}, DyadicInterval{2, 3}};
    s.y_families[{DyadicInterval::unit(), DyadicInterval{1, 0}}] = {
        DyadicInterval::unit()};
    const CaponReport rep = check(s);
    CHECK(!rep.ok);
    bool saw_x3 = false;
    for (const auto& v : rep.violations)
        if (v.condition == "X3") saw_x3 = true;
    CHECK(saw_x3);
}

TEST_CASE("from_block_family on product families") {
    const BlockFamily fam = product_family();
    const CaponStructure s = from_block_family(fam);
    CHECK(s.x_families.at({1, 0}) ==
          std::vector<DyadicInterval>{{2, 0}, {2, 1}});
    CHECK(s.y_families.at({{1, 0}, {2, 0}}).size() == 4);
    const CaponReport rep = check(s);
    CHECK(rep.ok);
    CHECK(rep.c_x.is_one());
    CHECK(rep.c_y.is_one());
}

TEST_CASE("singleton family extraction") {
    BlockFamily fam(1);
    fam.add_block(DyadicRectangle::unit(), {{DyadicRectangle::unit(), 1.0}});
    const CaponStructure s = from_block_family(fam);
    CHECK(s.x_families.at(DyadicInterval::unit()) ==
          std::vector<DyadicInterval>{DyadicInterval::unit()});
    CHECK(s.y_families.at({DyadicInterval::unit(), DyadicInterval::unit()}) ==
          std::vector<DyadicInterval>{DyadicInterval::unit()});
}

TEST_CASE("fragmented family is rejected") {
    CHECK_THROWS_WITH_AS(from_block_family(fragmented_family()),
                         doctest::Contains("not product-structured"),
                         std::invalid_argument);
}

TEST_CASE("round-trip structure -> family -> structure") {
    const CaponStructure s = from_block_family(product_family());
    const BlockFamily fam = to_block_family(s);
    const CaponStructure s2 = from_block_family(fam);
    CHECK(s.x_families == s2.x_families);
    CHECK(s.y_families == s2.y_families);
}

TEST_CASE("restricting depth never increases the minimal constants") {
    // structure with genuine C_X > 1: X_{[0,1)} covers 3/4 of the interval
    CaponStructure s;
    s.depth = 3;
    s.x_families[DyadicInterval::unit()] = {DyadicInterval{2, 0}, DyadicInterval{2, 1},
                                            DyadicInterval{2, 2}};
    s.y_families[{DyadicInterval::unit(), DyadicInterval{2, 0}}] = {
        DyadicInterval::unit()};
    s.y_families[{DyadicInterval::unit(), DyadicInterval{2, 1}}] = {
        DyadicInterval::unit()};
    s.y_families[{DyadicInterval::unit(), DyadicInterval{2, 2}}] = {
        DyadicInterval::unit()};
    const CaponReport full = check(s);
    CHECK(full.c_x == Ratio{4, 3});
    const CaponReport coarse = check(s.restricted(2));
    CHECK(!(full.c_x < coarse.c_x));
    CHECK(!(full.c_y < coarse.c_y));

    const CaponStructure triv = trivial_structure(3);
    const CaponReport t3 = check(triv);
    const CaponReport t2 = check(triv.restricted(2));
    CHECK(!(t3.c_x < t2.c_x));
    CHECK(!(t3.c_y < t2.c_y));
}

TEST_CASE("derived-set monotonicity on a product structure") {
    const CaponStructure s = from_block_family(product_family());
    // J = [0,1) split into its halves: small sets are disjoint and nest
    const DyadicInterval j = DyadicInterval::unit();
    const auto [j0, j1] = j.halves();
    for (std::int64_t x = 0; x < (1 << s.depth); ++x) {
        const auto [sj, uj] = derived_sets(s, j, x);
        const auto [s0, u0] = derived_sets(s, j0, x);
        const auto [s1, u1] = derived_sets(s, j1, x);
        if (u0.none() || u1.none()) continue;
        CHECK(!s0.intersects(s1));
        CellSet un = s0;
        un |= s1;
        CHECK(un.subset_of(sj));
    }
}
