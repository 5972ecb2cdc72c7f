#pragma once

#include <vector>

#include "hpq/haar.hpp"
#include "hpq/mixed_norm.hpp"
#include "hpq/operators.hpp"

namespace hpq {

struct BlockMember {
    DyadicRectangle rect;
    double weight = 1.0;  // in [-1,1]; +-1 for sign families

    friend bool operator==(const BlockMember&, const BlockMember&) = default;
};

// The collections {B_{I x J}} generating block basis elements
// b_{I x J} = sum weight * h_{K x L}.  Within a block the member rectangles
// are pairwise disjoint; distinct blocks share no member rectangle.
class BlockFamily {
  public:
    explicit BlockFamily(int depth = 0) : depth_(depth) {}

    int depth() const { return depth_; }
    std::size_t size() const { return blocks_.size(); }
    bool empty() const { return blocks_.empty(); }

    // keeps blocks sorted by the ordering index of their generating rectangle
    void add_block(const DyadicRectangle& index, std::vector<BlockMember> members);

    bool has_block(const DyadicRectangle& index) const;
    const std::vector<BlockMember>& members(const DyadicRectangle& index) const;

    const std::vector<std::pair<DyadicRectangle, std::vector<BlockMember>>>& blocks()
        const {
        return blocks_;
    }

    // member disjointness within blocks + collection disjointness across blocks
    void validate() const;

    friend bool operator==(const BlockFamily&, const BlockFamily&) = default;

  private:
    int depth_;
    std::vector<std::pair<DyadicRectangle, std::vector<BlockMember>>> blocks_;
};

// b_R as a Haar expansion; throws on unknown R
HaarExpansion block_element(const BlockFamily& fam, const DyadicRectangle& r);

// sum of weight^2 |K x L| over the block members (exact for sign families)
double block_l2_norm_sq(const std::vector<BlockMember>& members);

// Matrix of the linear extension of h_R -> b_R on the depth-N span.
OperatorMatrix block_map(const BlockFamily& fam);

// Q f = sum <f, b_R>/||b_R||_2^2 b_R; throws on a degenerate (zero) block.
HaarExpansion projection_Q(const BlockFamily& fam, const HaarExpansion& f);

struct EquivalenceEstimate {
    double norm_b = 0.0;      // lower bound for ||B||
    double norm_b_inv = 0.0;  // lower bound for ||B^-1|| restricted to the range
    std::uint64_t samples = 0;
    bool exact = false;       // p=q=2 closed form
};

// Sampled equivalence constants of the block basis vs the Haar basis; exact
// at p=q=2 where both norms diagonalize over the coefficients.
EquivalenceEstimate equivalence_constants(const BlockFamily& fam, double p, double q,
                                          int budget, std::uint64_t seed);

}  // namespace hpq
