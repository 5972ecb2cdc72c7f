#pragma once

#include <cmath>
#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>

namespace hpq {

// Half-open dyadic interval [j*2^-k, (j+1)*2^-k) inside the unit interval.
struct DyadicInterval {
    int level = 0;
    std::int64_t pos = 0;

    static constexpr DyadicInterval unit() { return {0, 0}; }

    bool is_unit() const { return level == 0; }
    bool valid() const {
        return level >= 0 && level < 62 && pos >= 0 &&
               pos < (std::int64_t{1} << level);
    }

    double length() const { return std::ldexp(1.0, -level); }
    double left() const { return std::ldexp(static_cast<double>(pos), -level); }
    double right() const { return std::ldexp(static_cast<double>(pos + 1), -level); }

    // o subset-or-equal of this
    bool contains(const DyadicInterval& o) const {
        return o.level >= level && (o.pos >> (o.level - level)) == pos;
    }

    DyadicInterval predecessor() const {
        if (is_unit())
            throw std::domain_error("unit interval has no dyadic predecessor");
        return {level - 1, pos >> 1};
    }

    std::pair<DyadicInterval, DyadicInterval> halves() const {
        return {{level + 1, 2 * pos}, {level + 1, 2 * pos + 1}};
    }

    // whether this is the left half of its predecessor
    bool is_left_half() const {
        if (is_unit())
            throw std::domain_error("unit interval is not a half");
        return (pos & 1) == 0;
    }

    friend bool operator==(const DyadicInterval&, const DyadicInterval&) = default;
    friend auto operator<=>(const DyadicInterval&, const DyadicInterval&) = default;

    std::string str() const {
        return "[" + std::to_string(pos) + "/2^" + std::to_string(level) + ")";
    }
};

inline bool intervals_disjoint(const DyadicInterval& a, const DyadicInterval& b) {
    return !a.contains(b) && !b.contains(a);
}

struct DyadicRectangle {
    DyadicInterval x, y;

    static constexpr DyadicRectangle unit() { return {{0, 0}, {0, 0}}; }

    bool valid() const { return x.valid() && y.valid(); }
    int max_level() const { return x.level > y.level ? x.level : y.level; }
    int level_sum() const { return x.level + y.level; }
    double measure() const { return std::ldexp(1.0, -level_sum()); }

    bool contains(const DyadicRectangle& o) const {
        return x.contains(o.x) && y.contains(o.y);
    }

    DyadicRectangle pred_x() const { return {x.predecessor(), y}; }
    DyadicRectangle pred_y() const { return {x, y.predecessor()}; }

    friend bool operator==(const DyadicRectangle&, const DyadicRectangle&) = default;
    friend auto operator<=>(const DyadicRectangle&, const DyadicRectangle&) = default;

    std::string str() const { return x.str() + "x" + y.str(); }
};

inline bool rectangles_disjoint(const DyadicRectangle& a, const DyadicRectangle& b) {
    return intervals_disjoint(a.x, b.x) || intervals_disjoint(a.y, b.y);
}

enum class RectRelation { Equal, AInsideB, BInsideA, Disjoint, ProperOverlap };

// Dyadic rectangles either nest per coordinate or are disjoint per coordinate;
// ProperOverlap is the mixed case (x nests one way, y the other, both strictly).
RectRelation relations(const DyadicRectangle& a, const DyadicRectangle& b);

using OrderingIndex = std::uint64_t;

// Number of rectangles with both levels <= depth: (2^(depth+1)-1)^2.
std::uint64_t rectangle_count(int depth);

// Linear ordering on dyadic rectangles.  Shell k = {R : max level = k} occupies
// exactly the index range [(2^k-1)^2, (2^(k+1)-1)^2); within a shell rectangles
// are sorted by ascending level sum, then descending x-level, then positions.
// Dyadic predecessors always come strictly before their children.
OrderingIndex ordering_index(const DyadicRectangle& r);
DyadicRectangle rectangle_at(OrderingIndex n);

}  // namespace hpq
