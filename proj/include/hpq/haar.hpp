#pragma once

#include <map>
#include <vector>

#include "hpq/dyadic.hpp"

namespace hpq {

// Finite bi-parameter Haar expansion f = sum a_R h_R over rectangles of
// depth <= depth().  Coefficients are keyed by ordering index, so iteration
// over terms() is deterministic.
class HaarExpansion {
  public:
    explicit HaarExpansion(int depth = 0) : depth_(depth) {
        if (depth < 0 || depth > 30)
            throw std::invalid_argument("HaarExpansion: depth out of range");
    }

    int depth() const { return depth_; }

    void set(const DyadicRectangle& r, double v);
    void add(const DyadicRectangle& r, double v);
    double coeff(const DyadicRectangle& r) const;

    const std::map<OrderingIndex, double>& coeffs() const { return coeffs_; }
    std::size_t size() const { return coeffs_.size(); }
    bool empty() const { return coeffs_.empty(); }

    // largest level actually present (0 when empty)
    int max_level_used() const;

    HaarExpansion& operator*=(double c);
    HaarExpansion& operator+=(const HaarExpansion& o);

  private:
    int depth_;
    std::map<OrderingIndex, double> coeffs_;
};

// Piecewise constant function on the 2^depth x 2^depth half-open dyadic cells.
class GridFunction {
  public:
    explicit GridFunction(int depth = 0)
        : depth_(depth), values_(std::size_t{1} << (2 * depth), 0.0) {
        if (depth < 0 || depth > 14)
            throw std::invalid_argument("GridFunction: depth out of range");
    }

    int depth() const { return depth_; }
    int cells_per_side() const { return 1 << depth_; }

    double& at(int xcell, int ycell) {
        return values_[(static_cast<std::size_t>(xcell) << depth_) + ycell];
    }
    double at(int xcell, int ycell) const {
        return values_[(static_cast<std::size_t>(xcell) << depth_) + ycell];
    }

    const std::vector<double>& values() const { return values_; }
    std::vector<double>& values() { return values_; }

  private:
    int depth_;
    std::vector<double> values_;  // x-major
};

// Value of h_R on the given cell of a 2^resolution grid (+1, -1 or 0).
// Exactness requires resolution >= max level of R + 1.
int haar_value(const DyadicRectangle& r, int xcell, int ycell, int resolution);

// Evaluate the expansion on a grid.  grid_depth < 0 picks the coarsest exact
// resolution, max level used + 1.
GridFunction synthesize(const HaarExpansion& e, int grid_depth = -1);

// Orthogonal projection onto the Haar span: a_R = <g, h_R>/|R| for all
// rectangles of depth <= g.depth()-1 (level-(g.depth()) coefficients of a
// depth-g grid vanish identically).  Exact left inverse of synthesize.
HaarExpansion analyze(const GridFunction& g);

// \int\int f*g over the unit square by cell-wise quadrature; exact whenever
// the products are exactly representable (always for sign expansions).
double inner_product(const HaarExpansion& f, const HaarExpansion& g);

// Coefficient-side inner product sum a_R b_R |R|; equals inner_product by
// orthogonality of the Haar system (cross-checked in tests).
double inner_product_coeff(const HaarExpansion& f, const HaarExpansion& g);

}  // namespace hpq
