// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure.  Tolerances are pinned in code next to each criterion.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include "hpq/capon.hpp"
#include "hpq/factorize.hpp"
#include "hpq/json_io.hpp"
#include "hpq/rng.hpp"

using namespace hpq;

namespace {

struct Criterion {
    int id;
    std::string name;
    std::function<bool(std::string&)> run;
};

bool g_all_ok = true;

void run_criterion(const Criterion& c) {
    std::string detail;
    const auto start = std::chrono::steady_clock::now();
    bool ok = false;
    try {
        ok = c.run(detail);
    } catch (const std::exception& e) {
        ok = false;
        detail = std::string("exception: ") + e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("[%s] criterion %2d: %s (%.1fs)%s%s\n", ok ? "PASS" : "FAIL", c.id,
                c.name.c_str(), secs, detail.empty() ? "" : " -- ", detail.c_str());
    std::fflush(stdout);
    if (!ok) g_all_ok = false;
}

HaarExpansion random_expansion(int depth, std::size_t terms, Rng& rng) {
    HaarExpansion e(depth);
    const std::uint64_t n = rectangle_count(depth);
    for (std::size_t i = 0; i < terms; ++i)
        e.add(rectangle_at(rng.next_below(n)), rng.next_signed());
    return e;
}

const double kExponents[] = {1.0, 1.5, 2.0, 3.0};

// the criterion-8 configuration, reused by 5, 7 and 11
const TestOperatorParams kAcceptOpParams{0.8, 0.1, 0.02, 6, 1.0};
constexpr std::uint64_t kAcceptSeed = 2024;

OperatorMatrix acceptance_operator(double delta) {
    TestOperatorParams p = kAcceptOpParams;
    p.delta = delta;
    return gen_test_operator(TestOperatorKind::DiagonalDecaying, p, kAcceptSeed, 8);
}

ConstructionParams acceptance_params(double delta) {
    ConstructionParams params;
    params.delta = delta;
    params.eta = 0.0;  // delta/9
    params.depth = 8;
    params.n_steps = 9;
    params.sign_budget = 4096;
    params.seed = kAcceptSeed;
    return params;
}

// 1. Haar normalization to 1e-12, depth <= 5, (p,q) in {1,1.5,2,3}^2
bool criterion_1(std::string& detail) {
    for (OrderingIndex i = 0; i < rectangle_count(5); ++i) {
        const DyadicRectangle r = rectangle_at(i);
        HaarExpansion e(r.max_level());
        e.set(r, 1.0);
        for (double p : kExponents)
            for (double q : kExponents) {
                const double expect =
                    std::pow(r.x.length(), 1.0 / p) * std::pow(r.y.length(), 1.0 / q);
                if (std::abs(mixed_norm(e, {p, q}) - expect) > 1e-12) {
                    detail = "mismatch at " + r.str();
                    return false;
                }
            }
    }
    detail = std::to_string(rectangle_count(5)) + " rectangles x 16 exponent pairs";
    return true;
}

// 2. orthogonality <h_R, h_R'> = delta_{RR'} |R| exactly, depth <= 4
bool criterion_2(std::string& detail) {
    const std::uint64_t n = rectangle_count(4);
    const int grid = 5;  // joint resolution for every pair
    std::vector<GridFunction> grids;
    grids.reserve(n);
    for (OrderingIndex i = 0; i < n; ++i) {
        HaarExpansion e(4);
        e.set(rectangle_at(i), 1.0);
        grids.push_back(synthesize(e, grid));
    }
    const double cell = std::ldexp(1.0, -2 * grid);
    for (OrderingIndex i = 0; i < n; ++i)
        for (OrderingIndex j = i; j < n; ++j) {
            double s = 0.0;
            const auto& a = grids[i].values();
            const auto& b = grids[j].values();
            for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
            s *= cell;
            const double expect = i == j ? rectangle_at(i).measure() : 0.0;
            if (s != expect) {
                detail = "pair " + rectangle_at(i).str() + ", " + rectangle_at(j).str();
                return false;
            }
        }
    detail = std::to_string(n * (n + 1) / 2) + " exact pairings";
    return true;
}

// 3. ordering laws at depth 6: shell bounds, predecessor monotonicity,
// bijectivity of index and inverse
bool criterion_3(std::string& detail) {
    const std::uint64_t count = rectangle_count(6);
    std::vector<bool> seen(count, false);
    for (int kx = 0; kx <= 6; ++kx)
        for (int ky = 0; ky <= 6; ++ky)
            for (std::int64_t jx = 0; jx < (std::int64_t{1} << kx); ++jx)
                for (std::int64_t jy = 0; jy < (std::int64_t{1} << ky); ++jy) {
                    const DyadicRectangle r{{kx, jx}, {ky, jy}};
                    const OrderingIndex idx = ordering_index(r);
                    const int k = r.max_level();
                    const std::uint64_t side_k = (std::uint64_t{1} << k) - 1;
                    const std::uint64_t side_k1 = (std::uint64_t{1} << (k + 1)) - 1;
                    if (idx < side_k * side_k || idx >= side_k1 * side_k1) {
                        detail = "shell bound at " + r.str();
                        return false;
                    }
                    if (idx >= count || seen[idx] || !(rectangle_at(idx) == r)) {
                        detail = "bijection at " + r.str();
                        return false;
                    }
                    seen[idx] = true;
                    if (!r.x.is_unit() && ordering_index(r.pred_x()) >= idx) {
                        detail = "x-predecessor law at " + r.str();
                        return false;
                    }
                    if (!r.y.is_unit() && ordering_index(r.pred_y()) >= idx) {
                        detail = "y-predecessor law at " + r.str();
                        return false;
                    }
                }
    detail = std::to_string(count) + " indices";
    return true;
}

// 4. sign-flip invariance of the mixed norm, exact, 100 cases per (p,q)
bool criterion_4(std::string& detail) {
    Rng rng(404);
    for (double p : kExponents)
        for (double q : kExponents)
            for (int trial = 0; trial < 100; ++trial) {
                const HaarExpansion f = random_expansion(4, 25, rng);
                HaarExpansion flipped(f.depth());
                for (const auto& [idx, v] : f.coeffs())
                    flipped.set(rectangle_at(idx), (rng.next_u64() & 1) ? -v : v);
                if (mixed_norm(f, {p, q}) != mixed_norm(flipped, {p, q})) {
                    detail = "inequality at p=" + std::to_string(p) +
                             " q=" + std::to_string(q);
                    return false;
                }
            }
    detail = "1600 exact equalities";
    return true;
}

// 5. Capon constants: trivial family, construction runs, fragmented family
bool criterion_5(std::string& detail) {
    const CaponReport triv = check(trivial_structure(3));
    if (!triv.ok || !triv.c_x.is_one() || !triv.c_y.is_one()) {
        detail = "trivial structure";
        return false;
    }
    for (double delta : {0.8, 1.0}) {
        const OperatorMatrix t = acceptance_operator(delta);
        const ConstructionResult res = build(t, acceptance_params(delta));
        if (!res.clean()) {
            detail = "construction not clean at delta=" + std::to_string(delta);
            return false;
        }
        const CaponReport rep = check(from_block_family(res.family));
        if (!rep.ok || !rep.c_x.is_one() || !rep.c_y.is_one()) {
            detail = "construction constants differ from 1 at delta=" +
                     std::to_string(delta);
            return false;
        }
    }
    // fragmented cover: product-structure rejection
    BlockFamily frag(3);
    const DyadicInterval unit = DyadicInterval::unit();
    frag.add_block(DyadicRectangle::unit(), {{DyadicRectangle::unit(), 1.0}});
    frag.add_block({{1, 0}, unit}, {{{{2, 0}, unit}, 1.0}, {{{2, 1}, unit}, 1.0}});
    std::vector<BlockMember> bad;
    for (std::int64_t jx : {0, 1, 2, 3})
        for (std::int64_t jy : {0, 1})
            bad.push_back({{{3, jx}, {2, jy}}, 1.0});
    frag.add_block({{1, 0}, {1, 0}}, bad);
    try {
        (void)from_block_family(frag);
        detail = "fragmented family was not rejected";
        return false;
    } catch (const std::invalid_argument& e) {
        if (std::string(e.what()).find("not product-structured") == std::string::npos) {
            detail = "unexpected rejection message";
            return false;
        }
    }
    detail = "trivial + 2 construction runs + rejection";
    return true;
}

// 6. projection Q: idempotence/self-adjointness to 1e-10; ratio growth
// across depths 4,5,6 bounded by 1.5x
bool criterion_6(std::string& detail) {
    // depth-4 operator with couplings confined to the coarse levels, so the
    // construction has room to pick clean frequencies below the depth ceiling
    TestOperatorParams op_params = kAcceptOpParams;
    op_params.coupling_cap = 2;
    const OperatorMatrix t = gen_test_operator(TestOperatorKind::DiagonalDecaying,
                                               op_params, kAcceptSeed, 4);
    ConstructionParams params = acceptance_params(0.8);
    params.depth = 4;
    const ConstructionResult res = build(t, params);
    if (!res.clean()) {
        detail = "depth-4 construction not clean";
        return false;
    }
    const BlockFamily& fam = res.family;

    Rng rng(606);
    for (int trial = 0; trial < 50; ++trial) {
        const HaarExpansion f = random_expansion(4, 30, rng);
        const HaarExpansion qf = projection_Q(fam, f);
        const HaarExpansion qqf = projection_Q(fam, qf);
        for (const auto& [idx, v] : qf.coeffs())
            if (std::abs(qqf.coeff(rectangle_at(idx)) - v) > 1e-10) {
                detail = "idempotence";
                return false;
            }
        const HaarExpansion g = random_expansion(4, 30, rng);
        const double lhs = inner_product_coeff(qf, g);
        const double rhs = inner_product_coeff(f, projection_Q(fam, g));
        if (std::abs(lhs - rhs) > 1e-10) {
            detail = "self-adjointness";
            return false;
        }
    }

    // empirical norm ratios over 200 random functions per depth
    for (const MixedNormParams mp : {MixedNormParams{1, 2}, MixedNormParams{2, 2}}) {
        double max4 = 0.0, max6 = 0.0;
        for (int depth : {4, 5, 6}) {
            Rng drng(hash_combine(606, static_cast<std::uint64_t>(depth)));
            double worst = 0.0;
            for (int trial = 0; trial < 200; ++trial) {
                const HaarExpansion f = random_expansion(depth, 40, drng);
                const double nf = mixed_norm(f, mp);
                if (nf <= 0.0) continue;
                const double nq = mixed_norm(projection_Q(fam, f), mp);
                worst = std::max(worst, nq / nf);
            }
            if (depth == 4) max4 = worst;
            if (depth == 6) max6 = worst;
        }
        if (max6 > 1.5 * max4) {
            detail = "ratio growth " + format_sig(max4) + " -> " + format_sig(max6) +
                     " at p=" + format_sig(mp.p) + " q=" + format_sig(mp.q);
            return false;
        }
    }
    detail = "50 projection identities + ratio growth within 1.5x";
    return true;
}

// 7. block norm identities for a 9-step construction
bool criterion_7(std::string& detail) {
    const OperatorMatrix t = acceptance_operator(0.8);
    const ConstructionResult res = build(t, acceptance_params(0.8));
    if (!res.clean()) {
        detail = "construction not clean";
        return false;
    }
    for (const auto& [index, members] : res.family.blocks()) {
        if (block_l2_norm_sq(members) != index.measure()) {
            detail = "l2 identity at " + index.str();
            return false;
        }
        const HaarExpansion b = block_element(res.family, index);
        for (double u : kExponents)
            for (double v : kExponents) {
                const double expect = std::pow(index.x.length(), 1.0 / u) *
                                      std::pow(index.y.length(), 1.0 / v);
                if (std::abs(mixed_norm(b, {u, v}) - expect) > 1e-10) {
                    detail = "mixed-norm identity at " + index.str() + " u=" +
                             format_sig(u) + " v=" + format_sig(v);
                    return false;
                }
            }
    }
    detail = "9 blocks x (1 exact l2 + 16 mixed norms)";
    return true;
}

// 8. full factorization at desk scale; norm product scales like 1/delta
bool criterion_8(std::string& detail) {
    const double delta = 0.8;
    const double eta = delta / 9.0;
    const OperatorMatrix t = acceptance_operator(delta);
    const ConstructionResult res = build(t, acceptance_params(delta));
    if (!res.clean()) {
        detail = "relaxation flags raised";
        return false;
    }
    for (const MixedNormParams mp : {MixedNormParams{2, 2}, MixedNormParams{1, 2}}) {
        const FactorizationResult f = assemble(t, res.family, mp.p, mp.q, 32, kAcceptSeed);
        if (f.residual > eta / (delta - eta)) {
            detail = "residual " + format_sig(f.residual) + " above 1/8 at p=" +
                     format_sig(mp.p) + " q=" + format_sig(mp.q);
            return false;
        }
    }
    // substitute for the universal constant: ||R|| ||S|| ~ 1/delta within 2x
    std::vector<double> scaled;
    for (double d : {0.5, 0.8, 1.0}) {
        const OperatorMatrix td = acceptance_operator(d);
        const ConstructionResult rd = build(td, acceptance_params(d));
        if (!rd.clean()) {
            detail = "relaxation flags at delta=" + format_sig(d);
            return false;
        }
        const FactorizationResult fd = assemble(td, rd.family, 2, 2, 32, kAcceptSeed);
        scaled.push_back(fd.norm_product * d);
    }
    for (double a : scaled)
        for (double b : scaled)
            if (a > 2.0 * b) {
                detail = "norm product deviates from 1/delta scaling by more than 2x";
                return false;
            }
    detail = "residuals within 1/8; scaling spread within 2x";
    return true;
}

// 9. Fredholm two-term factorization, 20 random matrices, dim <= 64
bool criterion_9(std::string& detail) {
    Rng rng(909);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 2 + static_cast<int>(rng.next_below(63));
        const int nullity = static_cast<int>(rng.next_below(
            static_cast<std::uint64_t>(n / 2 + 1)));
        Eigen::MatrixXd m(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) m(i, j) = rng.next_signed();
        if (nullity > 0) {
            Eigen::JacobiSVD<Eigen::MatrixXd> svd(m,
                                                  Eigen::ComputeFullU | Eigen::ComputeFullV);
            Eigen::VectorXd s = svd.singularValues();
            for (int i = 0; i < nullity; ++i) s(n - 1 - i) = 0.0;
            m = svd.matrixU() * s.asDiagonal() * svd.matrixV().transpose();
        }
        const FredholmFactorization f = fredholm_two_term(m);
        if (!f.feasible || f.nullity != nullity) {
            detail = "feasibility at trial " + std::to_string(trial) + " (dim " +
                     std::to_string(n) + ")";
            return false;
        }
        const Eigen::MatrixXd sum = f.s1 * m * f.r1 + f.s2 * m * f.r2;
        const double err = (sum - Eigen::MatrixXd::Identity(n, n)).norm();
        if (err > 1e-8) {
            detail = "residual " + format_sig(err) + " at trial " + std::to_string(trial);
            return false;
        }
    }
    // infeasible instance correctly reported
    Eigen::MatrixXd bad = Eigen::MatrixXd::Zero(4, 4);
    bad(0, 0) = 1.0;
    if (fredholm_two_term(bad).feasible) {
        detail = "nullity > rank was not rejected";
        return false;
    }
    detail = "20 random factorizations + infeasibility report";
    return true;
}

// 10. sign-search statistics on exhaustive instances
bool criterion_10(std::string& detail) {
    // operator with genuine sibling couplings at coarse levels
    const OperatorMatrix t = gen_test_operator(TestOperatorKind::DiagonalDecaying,
                                               {0.8, 0.1, 0.3, 8, 1.0}, 1010, 4);
    ConstructionParams params;
    params.delta = 0.8;
    params.depth = 4;
    params.n_steps = 1;
    params.seed = 1010;
    Builder b(t, params);
    b.init_state();
    int checked = 0;
    for (OrderingIndex i = 1; i <= 4; ++i) {
        for (int m = 1; m <= 4; ++m) {
            const auto face = candidate_frequencies(b.family(), i, m);
            if (face.empty() || face.size() > 16) continue;
            const SignEnsembleStats st = sign_ensemble_stats(t, face);
            if (std::abs(st.mean) > 1e-12) {
                detail = "ensemble mean " + format_sig(st.mean);
                return false;
            }
            double l2 = 0.0;
            for (const auto& r : face) l2 += r.measure();
            const double threshold = (0.8 / 9.0) * l2;
            const double frac = st.violation_fraction(threshold);
            const double bound = st.chebyshev_bound(threshold);
            if (frac > bound + 1e-15) {
                detail = "violation fraction " + format_sig(frac) + " above bound " +
                         format_sig(bound);
                return false;
            }
            ++checked;
        }
        if (i < 4) b.step(i);
    }
    if (checked < 4) {
        detail = "too few exhaustive instances (" + std::to_string(checked) + ")";
        return false;
    }
    detail = std::to_string(checked) + " exhaustive ensembles";
    return true;
}

// 11. determinism: byte-identical artifacts for repeated criterion-8 runs
bool criterion_11(std::string& detail) {
    auto run_once = [&]() {
        const OperatorMatrix t = acceptance_operator(0.8);
        const ConstructionResult res = build(t, acceptance_params(0.8));
        const FactorizationResult f = assemble(t, res.family, 2, 2, 32, kAcceptSeed);
        Json fam = family_to_json(res.family);
        Json diag = diagnostics_to_json(res);
        Json rep = Json{{"residual", f.residual},
                        {"norm_product", f.norm_product},
                        {"conditioning", f.conditioning},
                        {"capon", report_to_json(check(from_block_family(res.family)))}};
        return fam.dump() + "\n" + diag.dump() + "\n" + rep.dump();
    };
    const std::string a = run_once();
    const std::string b = run_once();
    if (a != b) {
        detail = "artifact bytes differ between runs";
        return false;
    }
    detail = std::to_string(a.size()) + " artifact bytes reproduced";
    return true;
}

}  // namespace

int main() {
    const std::vector<Criterion> criteria{
        {1, "Haar normalization |I|^(1/p) |J|^(1/q)", criterion_1},
        {2, "exact orthogonality at depth 4", criterion_2},
        {3, "ordering laws at depth 6", criterion_3},
        {4, "sign-flip invariance of the mixed norm", criterion_4},
        {5, "Capon constants and product-structure rejection", criterion_5},
        {6, "projection Q identities and depth-stable norm ratios", criterion_6},
        {7, "block norm identities", criterion_7},
        {8, "factorization residual and 1/delta scaling", criterion_8},
        {9, "two-term Fredholm factorization", criterion_9},
        {10, "sign-search ensemble statistics", criterion_10},
        {11, "byte-identical determinism", criterion_11},
    };
    for (const auto& c : criteria) run_criterion(c);
    return g_all_ok ? 0 : 1;
}
