#include "hpq/factorize.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <limits>

#include "hpq/rng.hpp"

namespace hpq {

namespace {

std::vector<double> diag_pairings(const OperatorMatrix& t, const BlockFamily& fam) {
    const auto p = block_pairings(t, fam);
    std::vector<double> d(fam.size());
    for (std::size_t i = 0; i < fam.size(); ++i) d[i] = p[i][i];
    return d;
}

void guard_density(const BlockFamily& fam) {
    double quad = 0.0;
    for (const auto& [index, members] : fam.blocks()) {
        const double m = static_cast<double>(members.size());
        quad += m * m;
    }
    if (quad > 5e7)
        throw PipelineError("factorize: block family too dense to materialize U/V");
}

}  // namespace

OperatorMatrix build_U(const OperatorMatrix& t, const BlockFamily& fam) {
    guard_density(fam);
    const auto d = diag_pairings(t, fam);
    const auto& blocks = fam.blocks();
    OperatorMatrix u(fam.depth());
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        if (d[i] == 0.0)
            throw PipelineError("build_U: vanishing diagonal pairing for block " +
                                blocks[i].first.str());
        for (const auto& col_mem : blocks[i].second) {
            const double functional =
                col_mem.weight * col_mem.rect.measure() / d[i];  // <h_col, b_i>/d_i
            for (const auto& row_mem : blocks[i].second)
                u.add_entry(ordering_index(row_mem.rect), ordering_index(col_mem.rect),
                            functional * row_mem.weight * row_mem.rect.measure());
        }
    }
    return u;
}

VData build_V(const OperatorMatrix& t, const BlockFamily& fam) {
    guard_density(fam);
    const auto pair = block_pairings(t, fam);
    const auto& blocks = fam.blocks();
    const int n = static_cast<int>(blocks.size());
    const auto d = diag_pairings(t, fam);
    for (int i = 0; i < n; ++i)
        if (d[i] == 0.0)
            throw PipelineError("build_V: vanishing diagonal pairing for block " +
                                blocks[i].first.str());

    Eigen::MatrixXd g(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) g(i, j) = pair[i][j] / d[i];

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(g, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const double sigma_min = svd.singularValues()(n - 1);
    if (sigma_min < 1e-8)
        throw PipelineError("build_V: Gram matrix conditioning " +
                            std::to_string(sigma_min) + " below 1e-8");
    const Eigen::MatrixXd ginv = svd.solve(Eigen::MatrixXd::Identity(n, n));

    // V f = sum_i [G^{-1} c(f)]_i b_i with c_j(f) = <f, b_j>/d_j
    VData out{OperatorMatrix(fam.depth()), g, sigma_min};
    for (int j = 0; j < n; ++j) {
        for (const auto& col_mem : blocks[static_cast<std::size_t>(j)].second) {
            const double functional = col_mem.weight * col_mem.rect.measure() / d[j];
            for (int i = 0; i < n; ++i) {
                const double gij = ginv(i, j);
                if (gij == 0.0) continue;
                for (const auto& row_mem : blocks[static_cast<std::size_t>(i)].second)
                    out.v.add_entry(ordering_index(row_mem.rect),
                                    ordering_index(col_mem.rect),
                                    functional * gij * row_mem.weight *
                                        row_mem.rect.measure());
            }
        }
    }
    return out;
}

FactorizationResult assemble(const OperatorMatrix& t, const BlockFamily& fam, double p,
                             double q, int norm_budget, std::uint64_t seed) {
    const MixedNormParams params(p, q);
    const auto& blocks = fam.blocks();
    const int n = static_cast<int>(blocks.size());
    if (n == 0) throw PipelineError("assemble: empty block family");

    const auto pair = block_pairings(t, fam);
    const auto d = diag_pairings(t, fam);
    for (int i = 0; i < n; ++i)
        if (d[i] == 0.0)
            throw PipelineError("assemble: vanishing diagonal pairing for block " +
                                blocks[static_cast<std::size_t>(i)].first.str());

    Eigen::MatrixXd g(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) g(i, j) = pair[i][j] / d[i];
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(g, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const double sigma_min = svd.singularValues()(n - 1);
    if (sigma_min < 1e-8)
        throw PipelineError("assemble: Gram matrix conditioning " +
                            std::to_string(sigma_min) + " below 1e-8");
    const Eigen::MatrixXd ginv = svd.solve(Eigen::MatrixXd::Identity(n, n));

    FactorizationResult res;
    res.p = p;
    res.q = q;
    res.conditioning = sigma_min;

    // R = J B: column h_i holds the expansion of b_i
    res.r = OperatorMatrix(fam.depth());
    for (const auto& [index, members] : blocks) {
        const OrderingIndex col = ordering_index(index);
        for (const auto& m : members)
            res.r.add_entry(ordering_index(m.rect), col, m.weight * m.rect.measure());
    }

    // S = B^{-1} V: S f = sum_i [G^{-1} c(f)]_i h_i
    res.s = OperatorMatrix(fam.depth());
    for (int j = 0; j < n; ++j) {
        for (const auto& col_mem : blocks[static_cast<std::size_t>(j)].second) {
            const double functional = col_mem.weight * col_mem.rect.measure() / d[j];
            for (int i = 0; i < n; ++i) {
                const double gij = ginv(i, j);
                if (gij == 0.0) continue;
                const DyadicRectangle hi = blocks[static_cast<std::size_t>(i)].first;
                res.s.add_entry(ordering_index(hi), ordering_index(col_mem.rect),
                                functional * gij * hi.measure());
            }
        }
    }

    // residual of S T R h_i = h_i over the built block indices
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
        const DyadicRectangle hi = blocks[static_cast<std::size_t>(i)].first;
        // c(T b_i) has entries G[k][i]; solve G a = c so a ~= e_i
        Eigen::VectorXd c(n);
        for (int k = 0; k < n; ++k) c(k) = g(k, i);
        const Eigen::VectorXd a = ginv * c;
        HaarExpansion diff(fam.depth());
        for (int k = 0; k < n; ++k) {
            const double coeff = a(k) - (k == i ? 1.0 : 0.0);
            if (coeff != 0.0)
                diff.add(blocks[static_cast<std::size_t>(k)].first, coeff);
        }
        const double num = mixed_norm(diff, params);
        HaarExpansion hexp(fam.depth());
        hexp.set(hi, 1.0);
        const double den = mixed_norm(hexp, params);
        worst = std::max(worst, num / den);
    }
    res.residual = worst;

    const NormEstimate nr = estimate_norm(res.r, p, q, norm_budget, seed);
    const NormEstimate ns =
        estimate_norm(res.s, p, q, norm_budget, hash_combine(seed, 0x5a5aULL));
    res.norm_r_est = nr.value;
    res.norm_s_est = ns.value;
    res.norm_product = nr.value * ns.value;
    res.norm_samples = nr.samples + ns.samples;
    res.norms_exact = nr.exact && ns.exact;
    res.almost_diag = almost_diag_check(t, fam);
    return res;
}

FredholmFactorization fredholm_two_term(const Eigen::MatrixXd& t, double rank_tol) {
    FredholmFactorization out;
    if (t.rows() != t.cols()) {
        out.reason = "matrix must be square";
        return out;
    }
    const int n = static_cast<int>(t.rows());
    out.dim = n;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(t, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Eigen::VectorXd sigma = svd.singularValues();
    const double smax = n > 0 ? sigma(0) : 0.0;
    const double tol = rank_tol > 0.0 ? rank_tol
                                      : std::max(1e-300, smax * n *
                                                             std::numeric_limits<double>::epsilon() *
                                                             16);
    int rank = 0;
    for (int i = 0; i < n; ++i)
        if (sigma(i) > tol) ++rank;
    const int nullity = n - rank;
    out.rank = rank;
    out.nullity = nullity;
    if (nullity > rank) {
        out.reason = "nullity " + std::to_string(nullity) + " exceeds rank " +
                     std::to_string(rank);
        return out;
    }
    out.feasible = true;

    const Eigen::MatrixXd u = svd.matrixU();
    const Eigen::MatrixXd v = svd.matrixV();

    // kernel basis x_j = last nullity right singular vectors; P = sum x_j x_j^T
    Eigen::MatrixXd p = Eigen::MatrixXd::Zero(n, n);
    for (int j = 0; j < nullity; ++j) {
        const Eigen::VectorXd xj = v.col(rank + j);
        p += xj * xj.transpose();
    }

    // S1 = J Ttilde^{-1} Q: the pseudoinverse restricted to the range
    Eigen::MatrixXd s1 = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < rank; ++i)
        s1 += v.col(i) * u.col(i).transpose() / sigma(i);

    out.r1 = Eigen::MatrixXd::Identity(n, n) - p;
    // y_j = leading right singular vectors, g_k = u_k / sigma_k:
    // <T y_j, g_k> = delta_jk
    out.r2 = Eigen::MatrixXd::Zero(n, n);
    out.s2 = Eigen::MatrixXd::Zero(n, n);
    for (int j = 0; j < nullity; ++j) {
        const Eigen::VectorXd yj = v.col(j);
        const Eigen::VectorXd fj = v.col(rank + j);  // functional of x_j
        const Eigen::VectorXd xj = v.col(rank + j);
        const Eigen::VectorXd gj = u.col(j) / sigma(j);
        out.r2 += yj * fj.transpose();
        out.s2 += xj * gj.transpose();
    }
    out.s1 = s1;

    const Eigen::MatrixXd lhs =
        out.s1 * t * out.r1 + out.s2 * t * out.r2 - Eigen::MatrixXd::Identity(n, n);
    Eigen::JacobiSVD<Eigen::MatrixXd> rsvd(lhs);
    out.residual = rsvd.singularValues().size() > 0 ? rsvd.singularValues()(0) : 0.0;
    return out;
}

}  // namespace hpq
