#include <doctest.h>

#include <cmath>

#include "hpq/blocks.hpp"
#include "hpq/rng.hpp"

using namespace hpq;

namespace {

// identity family on the first n rectangles
BlockFamily identity_family(int depth, std::uint64_t n) {
    BlockFamily fam(depth);
    for (OrderingIndex i = 0; i < n; ++i)
        fam.add_block(rectangle_at(i), {{rectangle_at(i), 1.0}});
    return fam;
}

// two-block sign family with multi-member blocks
BlockFamily two_block_family() {
    BlockFamily fam(2);
    fam.add_block(DyadicRectangle::unit(),
                  {{{{1, 0}, {1, 0}}, 1.0}, {{{1, 1}, {1, 1}}, -1.0}});
    fam.add_block({{1, 0}, {0, 0}}, {{{{1, 0}, {1, 1}}, 1.0}, {{{1, 1}, {1, 0}}, 1.0}});
    return fam;
}

HaarExpansion random_expansion(int depth, std::size_t terms, Rng& rng) {
    HaarExpansion e(depth);
    const std::uint64_t n = rectangle_count(depth);
    for (std::size_t i = 0; i < terms; ++i)
        e.add(rectangle_at(rng.next_below(n)), rng.next_signed());
    return e;
}

}  // namespace

TEST_CASE("block_element") {
    BlockFamily fam(1);
    fam.add_block(DyadicRectangle::unit(), {{DyadicRectangle::unit(), 1.0}});
    const HaarExpansion b = block_element(fam, DyadicRectangle::unit());
    CHECK(b.size() == 1);
    CHECK(b.coeff(DyadicRectangle::unit()) == 1.0);
    CHECK_THROWS_AS(block_element(fam, rectangle_at(1)), std::invalid_argument);

    const BlockFamily two = two_block_family();
    const auto& m0 = two.members(DyadicRectangle::unit());
    CHECK(block_l2_norm_sq(m0) == 0.5);  // two quarter-measure members
    // disjointness makes ||b||_2^2 additive; confirm against quadrature
    const HaarExpansion b0 = block_element(two, DyadicRectangle::unit());
    CHECK(inner_product(b0, b0) == 0.5);
}

TEST_CASE("family validation") {
    BlockFamily fam(2);
    fam.add_block(DyadicRectangle::unit(), {{rectangle_at(5), 1.0}});
    CHECK_THROWS_AS(fam.add_block(DyadicRectangle::unit(), {{rectangle_at(6), 1.0}}),
                    std::invalid_argument);
    // duplicate member across blocks
    BlockFamily dup(2);
    dup.add_block(DyadicRectangle::unit(), {{rectangle_at(5), 1.0}});
    dup.add_block(rectangle_at(1), {{rectangle_at(5), -1.0}});
    CHECK_THROWS_AS(dup.validate(), std::invalid_argument);
    // overlapping members inside one block (different shapes)
    BlockFamily bad(2);
    bad.add_block(DyadicRectangle::unit(),
                  {{DyadicRectangle{{1, 0}, {0, 0}}, 1.0},
                   {DyadicRectangle{{2, 0}, {0, 0}}, 1.0}});
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    // weights outside [-1,1]
    BlockFamily heavy(1);
    CHECK_THROWS_AS(heavy.add_block(DyadicRectangle::unit(),
                                    {{DyadicRectangle::unit(), 1.5}}),
                    std::invalid_argument);
}

TEST_CASE("block_map") {
    const BlockFamily id9 = identity_family(1, 9);
    const OperatorMatrix b = block_map(id9);
    for (OrderingIndex i = 0; i < 9; ++i) {
        CHECK(b.entry(i, i) == rectangle_at(i).measure());
        CHECK(b.column(i).size() == 1);
    }

    const BlockFamily two = two_block_family();
    const OperatorMatrix bm = block_map(two);
    // columns match the block elements
    for (const auto& [index, members] : two.blocks()) {
        const HaarExpansion be = block_element(two, index);
        for (const auto& [row, val] : bm.column(ordering_index(index))) {
            const DyadicRectangle rr = rectangle_at(row);
            CHECK(val == be.coeff(rr) * rr.measure());
        }
    }
    // images of distinct blocks are orthogonal
    const HaarExpansion b0 = block_element(two, DyadicRectangle::unit());
    const HaarExpansion b1 = block_element(two, {{1, 0}, {0, 0}});
    CHECK(inner_product(b0, b1) == 0.0);
}

TEST_CASE("projection_Q") {
    const BlockFamily fam = two_block_family();
    // fixed point on each block element, exactly
    for (const auto& [index, members] : fam.blocks()) {
        const HaarExpansion b = block_element(fam, index);
        const HaarExpansion qb = projection_Q(fam, b);
        CHECK(qb.coeffs() == b.coeffs());
    }
    // f orthogonal to all blocks maps to zero
    HaarExpansion perp(2);
    perp.set(rectangle_at(3), 1.0);  // [0,1] x [0,1/2) is in no block
    CHECK(projection_Q(fam, perp).empty());

    Rng rng(41);
    for (int trial = 0; trial < 20; ++trial) {
        const HaarExpansion f = random_expansion(2, 12, rng);
        const HaarExpansion qf = projection_Q(fam, f);
        const HaarExpansion qqf = projection_Q(fam, qf);
        // idempotence
        for (const auto& [idx, v] : qf.coeffs())
            CHECK(qqf.coeff(rectangle_at(idx)) == doctest::Approx(v).epsilon(1e-10));
        // self-adjointness <Qf, g> = <f, Qg>
        const HaarExpansion g = random_expansion(2, 12, rng);
        CHECK(inner_product_coeff(qf, g) ==
              doctest::Approx(inner_product_coeff(f, projection_Q(fam, g))).epsilon(1e-10));
    }

    BlockFamily degenerate(1);
    degenerate.add_block(DyadicRectangle::unit(), {{DyadicRectangle::unit(), 0.0}});
    HaarExpansion f(1);
    f.set(DyadicRectangle::unit(), 1.0);
    CHECK_THROWS_AS(projection_Q(degenerate, f), std::invalid_argument);
}

TEST_CASE("equivalence constants") {
    const BlockFamily id9 = identity_family(2, 9);
    const EquivalenceEstimate e = equivalence_constants(id9, 2, 2, 8, 3);
    CHECK(e.exact);
    CHECK(e.norm_b == 1.0);
    CHECK(e.norm_b_inv == 1.0);

    const EquivalenceEstimate s = equivalence_constants(id9, 1.5, 2.5, 16, 3);
    CHECK(!s.exact);
    // identity family: both sampled ratios are exactly 1
    CHECK(s.norm_b == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(s.norm_b_inv == doctest::Approx(1.0).epsilon(1e-12));

    // non-measure-preserving family: the closed form sees the worst block
    // (||b||_2^2 = 1/2 against |[0,1]^2| = 1)
    const BlockFamily two = two_block_family();
    const EquivalenceEstimate e2 = equivalence_constants(two, 2, 2, 8, 3);
    CHECK(e2.exact);
    CHECK(e2.norm_b == 1.0);
    CHECK(e2.norm_b_inv == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
}
