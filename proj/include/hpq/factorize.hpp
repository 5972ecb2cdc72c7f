#pragma once

#include <Eigen/Dense>
#include <string>

#include "hpq/construction.hpp"

namespace hpq {

// Pipeline failures (ill-conditioned G, degenerate blocks) are reported with
// this type so the CLI can map them to its own exit code.
struct PipelineError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// U f = sum <f, b_i>/<T b_i, b_i> b_i as a matrix on the depth-N span.
// Throws PipelineError when some diagonal pairing vanishes.
OperatorMatrix build_U(const OperatorMatrix& t, const BlockFamily& fam);

struct VData {
    OperatorMatrix v;          // (U T J)^{-1} U
    Eigen::MatrixXd gram;      // G[i][j] = coefficient of b_i in U T b_j
    double conditioning = 0.0; // smallest singular value of G
};

// V = (U T J)^{-1} U in block coordinates; PipelineError when the Gram matrix
// conditioning falls below 1e-8 (invertibility is only guaranteed for small
// eta).
VData build_V(const OperatorMatrix& t, const BlockFamily& fam);

struct FactorizationResult {
    OperatorMatrix r;   // h_i -> b_i into the ambient space
    OperatorMatrix s;   // block coordinates back to Haar coordinates
    double residual = 0.0;       // max_i ||S T R h_i - h_i|| / ||h_i||
    double norm_r_est = 0.0;
    double norm_s_est = 0.0;
    double norm_product = 0.0;   // sampled/exact ||R|| * ||S||
    double conditioning = 0.0;   // smallest singular value of G
    double almost_diag = 0.0;    // almost_diag_check value of the family
    double p = 2.0, q = 2.0;
    std::uint64_t norm_samples = 0;
    bool norms_exact = false;
};

// Assemble R = J B and S = B^{-1} V and verify S T R h_i = h_i on the block
// index range; the residual is measured in the mixed norm of (p, q).
FactorizationResult assemble(const OperatorMatrix& t, const BlockFamily& fam, double p,
                             double q, int norm_budget, std::uint64_t seed);

struct FredholmFactorization {
    bool feasible = false;
    std::string reason;
    int dim = 0;
    int nullity = 0;
    int rank = 0;
    Eigen::MatrixXd r1, r2, s1, s2;
    double residual = 0.0;  // ||S1 T R1 + S2 T R2 - I|| (spectral)
};

// Finite-matrix two-term factorization I = S1 T R1 + S2 T R2 through any
// matrix with nullity <= rank; infeasibility is reported, not thrown.
FredholmFactorization fredholm_two_term(const Eigen::MatrixXd& t,
                                        double rank_tol = -1.0);

}  // namespace hpq
