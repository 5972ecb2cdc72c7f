#include "hpq/haar.hpp"

#include <algorithm>

namespace hpq {

void HaarExpansion::set(const DyadicRectangle& r, double v) {
    if (r.max_level() > depth_)
        throw std::invalid_argument("HaarExpansion: rectangle deeper than expansion depth");
    if (v == 0.0)
        coeffs_.erase(ordering_index(r));
    else
        coeffs_[ordering_index(r)] = v;
}

void HaarExpansion::add(const DyadicRectangle& r, double v) {
    if (r.max_level() > depth_)
        throw std::invalid_argument("HaarExpansion: rectangle deeper than expansion depth");
    auto [it, inserted] = coeffs_.try_emplace(ordering_index(r), v);
    if (!inserted) {
        it->second += v;
        if (it->second == 0.0) coeffs_.erase(it);
    }
}

double HaarExpansion::coeff(const DyadicRectangle& r) const {
    auto it = coeffs_.find(ordering_index(r));
    return it == coeffs_.end() ? 0.0 : it->second;
}

int HaarExpansion::max_level_used() const {
    int m = 0;
    for (const auto& [idx, v] : coeffs_)
        m = std::max(m, rectangle_at(idx).max_level());
    return m;
}

HaarExpansion& HaarExpansion::operator*=(double c) {
    if (c == 0.0) {
        coeffs_.clear();
        return *this;
    }
    for (auto& [idx, v] : coeffs_) v *= c;
    return *this;
}

HaarExpansion& HaarExpansion::operator+=(const HaarExpansion& o) {
    for (const auto& [idx, v] : o.coeffs())
        add(rectangle_at(idx), v);
    return *this;
}

int haar_value(const DyadicRectangle& r, int xcell, int ycell, int resolution) {
    if (resolution < r.max_level() + 1)
        throw std::invalid_argument("haar_value: resolution too coarse for " + r.str());
    auto one_dim = [resolution](const DyadicInterval& iv, int cell) -> int {
        const int shift = resolution - iv.level;
        const std::int64_t base = iv.pos << shift;
        const std::int64_t c = static_cast<std::int64_t>(cell);
        if (c < base || c >= base + (std::int64_t{1} << shift)) return 0;
        return (c - base) < (std::int64_t{1} << (shift - 1)) ? 1 : -1;
    };
    return one_dim(r.x, xcell) * one_dim(r.y, ycell);
}

namespace {

// 2D difference-array accumulator: O(1) per box, one prefix pass at the end.
class BoxAccumulator {
  public:
    explicit BoxAccumulator(int depth)
        : n_(1 << depth), diff_((static_cast<std::size_t>(n_) + 1) * (n_ + 1), 0.0) {}

    void add(std::int64_t x0, std::int64_t x1, std::int64_t y0, std::int64_t y1,
             double v) {
        at(x0, y0) += v;
        at(x0, y1) -= v;
        at(x1, y0) -= v;
        at(x1, y1) += v;
    }

    void flush(GridFunction& g) const {
        std::vector<double> acc(static_cast<std::size_t>(n_), 0.0);
        for (int x = 0; x < n_; ++x) {
            double run = 0.0;
            for (int y = 0; y < n_; ++y) {
                run += at_c(x, y);
                acc[y] += run;
                g.at(x, y) = acc[y];
            }
        }
    }

  private:
    double& at(std::int64_t x, std::int64_t y) {
        return diff_[static_cast<std::size_t>(x) * (n_ + 1) + y];
    }
    double at_c(std::int64_t x, std::int64_t y) const {
        return diff_[static_cast<std::size_t>(x) * (n_ + 1) + y];
    }
    int n_;
    std::vector<double> diff_;
};

}  // namespace

GridFunction synthesize(const HaarExpansion& e, int grid_depth) {
    const int need = e.max_level_used() + 1;
    const int depth = grid_depth < 0 ? need : grid_depth;
    if (depth < need)
        throw std::invalid_argument("synthesize: resolution too coarse for expansion");
    GridFunction g(depth);
    BoxAccumulator acc(depth);
    for (const auto& [idx, a] : e.coeffs()) {
        const DyadicRectangle r = rectangle_at(idx);
        const std::int64_t x0 = r.x.pos << (depth - r.x.level);
        const std::int64_t x1 = (r.x.pos + 1) << (depth - r.x.level);
        const std::int64_t xm = (x0 + x1) / 2;
        const std::int64_t y0 = r.y.pos << (depth - r.y.level);
        const std::int64_t y1 = (r.y.pos + 1) << (depth - r.y.level);
        const std::int64_t ym = (y0 + y1) / 2;
        acc.add(x0, xm, y0, ym, a);
        acc.add(xm, x1, y0, ym, -a);
        acc.add(x0, xm, ym, y1, -a);
        acc.add(xm, x1, ym, y1, a);
    }
    g.values().assign(g.values().size(), 0.0);
    acc.flush(g);
    return g;
}

HaarExpansion analyze(const GridFunction& g) {
    const int M = g.depth();
    const int out_depth = M > 0 ? M - 1 : 0;
    HaarExpansion e(out_depth);
    if (M == 0) return e;
    const int n = g.cells_per_side();
    // inclusive-exclusive prefix table P[x][y] = sum of cells [0,x) x [0,y)
    std::vector<double> prefix(static_cast<std::size_t>(n + 1) * (n + 1), 0.0);
    auto pref = [&](std::int64_t x, std::int64_t y) -> double& {
        return prefix[static_cast<std::size_t>(x) * (n + 1) + y];
    };
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y)
            pref(x + 1, y + 1) =
                g.at(x, y) + pref(x, y + 1) + pref(x + 1, y) - pref(x, y);
    auto box = [&](std::int64_t x0, std::int64_t x1, std::int64_t y0,
                   std::int64_t y1) {
        return pref(x1, y1) - pref(x0, y1) - pref(x1, y0) + pref(x0, y0);
    };
    const double cell_area = std::ldexp(1.0, -2 * M);
    const std::uint64_t count = rectangle_count(out_depth);
    for (std::uint64_t idx = 0; idx < count; ++idx) {
        const DyadicRectangle r = rectangle_at(idx);
        const std::int64_t x0 = r.x.pos << (M - r.x.level);
        const std::int64_t x1 = (r.x.pos + 1) << (M - r.x.level);
        const std::int64_t xm = (x0 + x1) / 2;
        const std::int64_t y0 = r.y.pos << (M - r.y.level);
        const std::int64_t y1 = (r.y.pos + 1) << (M - r.y.level);
        const std::int64_t ym = (y0 + y1) / 2;
        const double ip = (box(x0, xm, y0, ym) - box(xm, x1, y0, ym) -
                           box(x0, xm, ym, y1) + box(xm, x1, ym, y1)) *
                          cell_area;
        if (ip != 0.0) e.set(r, ip / r.measure());
    }
    return e;
}

double inner_product(const HaarExpansion& f, const HaarExpansion& g) {
    const int M = std::max(f.max_level_used(), g.max_level_used()) + 1;
    const GridFunction gf = synthesize(f, M);
    const GridFunction gg = synthesize(g, M);
    const double cell_area = std::ldexp(1.0, -2 * M);
    double s = 0.0;
    const auto& a = gf.values();
    const auto& b = gg.values();
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s * cell_area;
}

double inner_product_coeff(const HaarExpansion& f, const HaarExpansion& g) {
    const auto& fa = f.coeffs();
    const auto& ga = g.coeffs();
    double s = 0.0;
    if (fa.size() <= ga.size()) {
        for (const auto& [idx, v] : fa) {
            auto it = ga.find(idx);
            if (it != ga.end()) s += v * it->second * rectangle_at(idx).measure();
        }
    } else {
        for (const auto& [idx, v] : ga) {
            auto it = fa.find(idx);
            if (it != fa.end()) s += v * it->second * rectangle_at(idx).measure();
        }
    }
    return s;
}

}  // namespace hpq
