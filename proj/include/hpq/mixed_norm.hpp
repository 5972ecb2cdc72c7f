#pragma once

#include "hpq/haar.hpp"

namespace hpq {

struct MixedNormParams {
    double p = 2.0;
    double q = 2.0;

    MixedNormParams() = default;
    MixedNormParams(double p_, double q_) : p(p_), q(q_) {
        if (!(p >= 1.0) || !(q >= 1.0) || !std::isfinite(p) || !std::isfinite(q))
            throw std::invalid_argument("MixedNormParams: need finite p, q >= 1");
    }
};

// Pointwise square function s = sum a_R^2 1_R, exact on the depth-N grid
// (h_R^2 is the indicator of R).
GridFunction square_function(const HaarExpansion& f);

// ( int ( int s^{q/2} dy )^{p/q} dx )^{1/p} by exact cell-wise quadrature.
double mixed_norm(const HaarExpansion& f, const MixedNormParams& params);

// Coefficient-side value at p=q=2: sqrt(sum a_R^2 |R|).  Cross-checks the
// quadrature path.
double l2_norm(const HaarExpansion& f);

// <T h_R, h_R> read from the image expansion T h_R; the large-diagonal
// hypothesis compares |.| against delta*|R|.
double large_diagonal_pairing(const HaarExpansion& t_of_h_r, const DyadicRectangle& r);

}  // namespace hpq
