#include "hpq/mixed_norm.hpp"

#include <cmath>

namespace hpq {

GridFunction square_function(const HaarExpansion& f) {
    const int depth = f.depth();
    GridFunction g(depth);
    // Rectangles of one level pair are disjoint, so a^2 contributions can be
    // accumulated per level pair and summed without cancellation (a plain 2D
    // difference array would subtract large intermediates and destroy the
    // tiny cell values that q<2 exponents then amplify).
    struct Layer {
        int kx, ky;
        std::vector<double> v;  // 2^kx * 2^ky, x-major
    };
    std::vector<Layer> layers;
    std::vector<int> layer_of(static_cast<std::size_t>((depth + 1) * (depth + 1)), -1);
    for (const auto& [idx, a] : f.coeffs()) {
        const DyadicRectangle r = rectangle_at(idx);
        const std::size_t key =
            static_cast<std::size_t>(r.x.level) * (depth + 1) + r.y.level;
        if (layer_of[key] < 0) {
            layer_of[key] = static_cast<int>(layers.size());
            layers.push_back(
                {r.x.level, r.y.level,
                 std::vector<double>(std::size_t{1} << (r.x.level + r.y.level), 0.0)});
        }
        Layer& l = layers[static_cast<std::size_t>(layer_of[key])];
        l.v[(static_cast<std::size_t>(r.x.pos) << l.ky) + static_cast<std::size_t>(r.y.pos)] +=
            a * a;
    }
    const int n = g.cells_per_side();
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y) {
            double s = 0.0;
            for (const Layer& l : layers)
                s += l.v[(static_cast<std::size_t>(x >> (depth - l.kx)) << l.ky) +
                         static_cast<std::size_t>(y >> (depth - l.ky))];
            g.at(x, y) = s;
        }
    return g;
}

double mixed_norm(const HaarExpansion& f, const MixedNormParams& params) {
    if (f.empty()) return 0.0;
    const GridFunction s = square_function(f);
    const int n = s.cells_per_side();
    const double cell = 1.0 / n;
    const double qh = params.q / 2.0;
    const double pq = params.p / params.q;
    double outer = 0.0;
    for (int x = 0; x < n; ++x) {
        double inner = 0.0;
        for (int y = 0; y < n; ++y) {
            const double v = s.at(x, y);
            if (v > 0.0) inner += std::pow(v, qh);
        }
        inner *= cell;
        if (inner > 0.0) outer += std::pow(inner, pq);
    }
    outer *= cell;
    return std::pow(outer, 1.0 / params.p);
}

double l2_norm(const HaarExpansion& f) {
    double s = 0.0;
    for (const auto& [idx, a] : f.coeffs())
        s += a * a * rectangle_at(idx).measure();
    return std::sqrt(s);
}

double large_diagonal_pairing(const HaarExpansion& t_of_h_r, const DyadicRectangle& r) {
    return t_of_h_r.coeff(r) * r.measure();
}

}  // namespace hpq
