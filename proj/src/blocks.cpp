#include "hpq/blocks.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "hpq/rng.hpp"

namespace hpq {

void BlockFamily::add_block(const DyadicRectangle& index, std::vector<BlockMember> members) {
    if (index.max_level() > depth_)
        throw std::invalid_argument("BlockFamily: index rectangle deeper than family");
    for (const auto& m : members) {
        if (m.rect.max_level() > depth_)
            throw std::invalid_argument("BlockFamily: member deeper than family depth");
        if (std::abs(m.weight) > 1.0)
            throw std::invalid_argument("BlockFamily: weight outside [-1,1]");
    }
    std::sort(members.begin(), members.end(),
              [](const BlockMember& a, const BlockMember& b) {
                  return ordering_index(a.rect) < ordering_index(b.rect);
              });
    const OrderingIndex key = ordering_index(index);
    auto it = std::lower_bound(blocks_.begin(), blocks_.end(), key,
                               [](const auto& blk, OrderingIndex k) {
                                   return ordering_index(blk.first) < k;
                               });
    if (it != blocks_.end() && it->first == index)
        throw std::invalid_argument("BlockFamily: duplicate block " + index.str());
    blocks_.insert(it, {index, std::move(members)});
}

bool BlockFamily::has_block(const DyadicRectangle& index) const {
    const OrderingIndex key = ordering_index(index);
    auto it = std::lower_bound(blocks_.begin(), blocks_.end(), key,
                               [](const auto& blk, OrderingIndex k) {
                                   return ordering_index(blk.first) < k;
                               });
    return it != blocks_.end() && it->first == index;
}

const std::vector<BlockMember>& BlockFamily::members(const DyadicRectangle& index) const {
    const OrderingIndex key = ordering_index(index);
    auto it = std::lower_bound(blocks_.begin(), blocks_.end(), key,
                               [](const auto& blk, OrderingIndex k) {
                                   return ordering_index(blk.first) < k;
                               });
    if (it == blocks_.end() || !(it->first == index))
        throw std::invalid_argument("BlockFamily: no block for " + index.str());
    return it->second;
}

void BlockFamily::validate() const {
    std::unordered_set<OrderingIndex> seen;
    for (const auto& [index, members] : blocks_) {
        for (const auto& m : members)
            if (!seen.insert(ordering_index(m.rect)).second)
                throw std::invalid_argument("BlockFamily: member " + m.rect.str() +
                                            " appears in two blocks");
        // fast path: members of equal shape are disjoint iff their positions
        // differ, which the uniqueness check above already guarantees
        bool same_shape = true;
        for (std::size_t a = 1; a < members.size(); ++a)
            if (members[a].rect.x.level != members[0].rect.x.level ||
                members[a].rect.y.level != members[0].rect.y.level) {
                same_shape = false;
                break;
            }
        if (same_shape) continue;
        for (std::size_t a = 0; a < members.size(); ++a)
            for (std::size_t b = a + 1; b < members.size(); ++b)
                if (!rectangles_disjoint(members[a].rect, members[b].rect))
                    throw std::invalid_argument(
                        "BlockFamily: overlapping members " + members[a].rect.str() +
                        ", " + members[b].rect.str() + " in block " + index.str());
    }
}

HaarExpansion block_element(const BlockFamily& fam, const DyadicRectangle& r) {
    HaarExpansion e(fam.depth());
    for (const auto& m : fam.members(r)) e.add(m.rect, m.weight);
    return e;
}

double block_l2_norm_sq(const std::vector<BlockMember>& members) {
    double s = 0.0;
    for (const auto& m : members) s += m.weight * m.weight * m.rect.measure();
    return s;
}

OperatorMatrix block_map(const BlockFamily& fam) {
    OperatorMatrix b(fam.depth());
    for (const auto& [index, members] : fam.blocks()) {
        const OrderingIndex col = ordering_index(index);
        for (const auto& m : members)
            b.add_entry(ordering_index(m.rect), col, m.weight * m.rect.measure());
    }
    return b;
}

HaarExpansion projection_Q(const BlockFamily& fam, const HaarExpansion& f) {
    HaarExpansion out(std::max(fam.depth(), f.depth()));
    for (const auto& [index, members] : fam.blocks()) {
        const double nsq = block_l2_norm_sq(members);
        if (nsq <= 0.0)
            throw std::invalid_argument("projection_Q: degenerate block " + index.str());
        double ip = 0.0;
        for (const auto& m : members)
            ip += m.weight * f.coeff(m.rect) * m.rect.measure();
        if (ip == 0.0) continue;
        const double c = ip / nsq;
        for (const auto& m : members) out.add(m.rect, c * m.weight);
    }
    return out;
}

EquivalenceEstimate equivalence_constants(const BlockFamily& fam, double p, double q,
                                          int budget, std::uint64_t seed) {
    if (budget < 1)
        throw std::invalid_argument("equivalence_constants: budget >= 1 required");
    const MixedNormParams params(p, q);
    EquivalenceEstimate est;
    if (fam.empty()) return est;

    if (p == 2.0 && q == 2.0) {
        // ||sum a_R b_R||_2^2 = sum a_R^2 ||b_R||_2^2 by collection
        // disjointness, so the extremal ratios are attained on single blocks
        double max_ratio = 0.0, max_inv = 0.0;
        for (const auto& [index, members] : fam.blocks()) {
            const double nsq = block_l2_norm_sq(members);
            const double msq = index.measure();
            max_ratio = std::max(max_ratio, nsq / msq);
            max_inv = std::max(max_inv, msq / nsq);
        }
        est.norm_b = std::sqrt(max_ratio);
        est.norm_b_inv = std::sqrt(max_inv);
        est.exact = true;
        est.samples = 0;
        return est;
    }

    Rng rng(seed);
    for (int s = 0; s < budget; ++s) {
        HaarExpansion fh(fam.depth());
        HaarExpansion fb(fam.depth());
        Rng draw = rng.stream(static_cast<std::uint64_t>(s));
        for (const auto& [index, members] : fam.blocks()) {
            const double a = draw.next_signed();
            if (a == 0.0) continue;
            fh.add(index, a);
            for (const auto& m : members) fb.add(m.rect, a * m.weight);
        }
        const double nh = mixed_norm(fh, params);
        const double nb = mixed_norm(fb, params);
        if (nh > 0.0 && nb > 0.0) {
            est.norm_b = std::max(est.norm_b, nb / nh);
            est.norm_b_inv = std::max(est.norm_b_inv, nh / nb);
        }
    }
    est.samples = static_cast<std::uint64_t>(budget);
    return est;
}

}  // namespace hpq
