#include "hpq/dyadic.hpp"

namespace hpq {

RectRelation relations(const DyadicRectangle& a, const DyadicRectangle& b) {
    if (a == b) return RectRelation::Equal;
    if (intervals_disjoint(a.x, b.x) || intervals_disjoint(a.y, b.y))
        return RectRelation::Disjoint;
    const bool ax_in_bx = b.x.contains(a.x);
    const bool ay_in_by = b.y.contains(a.y);
    const bool bx_in_ax = a.x.contains(b.x);
    const bool by_in_ay = a.y.contains(b.y);
    if (ax_in_bx && ay_in_by) return RectRelation::AInsideB;
    if (bx_in_ax && by_in_ay) return RectRelation::BInsideA;
    return RectRelation::ProperOverlap;
}

std::uint64_t rectangle_count(int depth) {
    if (depth < 0 || depth > 30)
        throw std::invalid_argument("rectangle_count: depth out of range");
    const std::uint64_t side = (std::uint64_t{1} << (depth + 1)) - 1;
    return side * side;
}

OrderingIndex ordering_index(const DyadicRectangle& r) {
    if (!r.valid())
        throw std::invalid_argument("ordering_index: invalid rectangle " + r.str());
    const int k = r.max_level();
    const int s = r.level_sum();
    const std::uint64_t sk = (std::uint64_t{1} << k) - 1;
    std::uint64_t idx = sk * sk;  // shells 0..k-1
    // full (level-sum t) bands below s, two blocks of 2^t rectangles each
    idx += (std::uint64_t{1} << (s + 1)) - (std::uint64_t{1} << (k + 1));
    // within the band: block with x-level == k first
    if (s < 2 * k && r.x.level != k) idx += std::uint64_t{1} << s;
    idx += (static_cast<std::uint64_t>(r.x.pos) << r.y.level) +
           static_cast<std::uint64_t>(r.y.pos);
    return idx;
}

DyadicRectangle rectangle_at(OrderingIndex n) {
    int k = 0;
    while (true) {
        const std::uint64_t side = (std::uint64_t{1} << (k + 1)) - 1;
        if (n < side * side) break;
        ++k;
        if (k > 60) throw std::invalid_argument("rectangle_at: index out of range");
    }
    const std::uint64_t sk = (std::uint64_t{1} << k) - 1;
    std::uint64_t r = n - sk * sk;
    for (int s = k; s < 2 * k; ++s) {
        const std::uint64_t band = std::uint64_t{1} << (s + 1);
        if (r < band) {
            const std::uint64_t block = std::uint64_t{1} << s;
            int kx, ky;
            if (r < block) {
                kx = k;
                ky = s - k;
            } else {
                kx = s - k;
                ky = k;
                r -= block;
            }
            return {{kx, static_cast<std::int64_t>(r >> ky)},
                    {ky, static_cast<std::int64_t>(r & ((std::uint64_t{1} << ky) - 1))}};
        }
        r -= band;
    }
    // the (k,k) block
    return {{k, static_cast<std::int64_t>(r >> k)},
            {k, static_cast<std::int64_t>(r & ((std::uint64_t{1} << k) - 1))}};
}

}  // namespace hpq
