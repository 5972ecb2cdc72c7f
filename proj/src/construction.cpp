#include "hpq/construction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>

#include "hpq/rng.hpp"

namespace hpq {

void ConstructionParams::validate() const {
    if (delta <= 0.0) throw std::invalid_argument("construction: delta must be positive");
    const double e = eta_or_default();
    if (!(e > 0.0) || !(e < delta))
        throw std::invalid_argument("construction: eta must lie in (0, delta)");
    if (depth < 1 || depth > 20)
        throw std::invalid_argument("construction: depth out of range");
    if (n_steps < 1 || static_cast<std::uint64_t>(n_steps) > rectangle_count(depth))
        throw std::invalid_argument("construction: n_steps exceeds the rectangle count");
    if (sign_budget < 1) throw std::invalid_argument("construction: sign_budget >= 1");
}

namespace {

void tiles_into(const DyadicInterval& host, int level,
                std::vector<DyadicInterval>& out) {
    if (level < host.level) return;
    const std::int64_t lo = host.pos << (level - host.level);
    const std::int64_t hi = (host.pos + 1) << (level - host.level);
    for (std::int64_t p = lo; p < hi; ++p) out.push_back({level, p});
}

}  // namespace

std::vector<DyadicRectangle> candidate_frequencies(const BlockFamily& prefix,
                                                   OrderingIndex i, int m) {
    if (i == 0)
        throw std::invalid_argument("candidate_frequencies: index 0 is the induction seed");
    if (m < 0 || m > prefix.depth())
        throw std::invalid_argument("candidate_frequencies: frequency exceeds depth");
    const DyadicRectangle r = rectangle_at(i);
    std::vector<DyadicRectangle> face;

    if (r.y.is_unit()) {
        // Case 1: refine the x-sides of B_{pred(I) x [0,1]} on one half
        const DyadicRectangle pred = r.pred_x();
        const bool left = r.x.is_left_half();
        std::vector<DyadicInterval> ks;
        for (const auto& mem : prefix.members(pred)) {
            const auto [lh, rh] = mem.rect.x.halves();
            tiles_into(left ? lh : rh, m, ks);
        }
        for (const auto& k : ks) face.push_back({k, DyadicInterval::unit()});
    } else if (r.x.is_unit()) {
        // Case 2.a: mirror step in y
        const DyadicRectangle pred = r.pred_y();
        const bool left = r.y.is_left_half();
        std::vector<DyadicInterval> ls;
        for (const auto& mem : prefix.members(pred)) {
            const auto [lh, rh] = mem.rect.y.halves();
            tiles_into(left ? lh : rh, m, ls);
        }
        for (const auto& l : ls) face.push_back({DyadicInterval::unit(), l});
    } else {
        // Case 2.b: x-sides of B_{I x [0,1]} intact, frequency-m cover in y
        // inside B_{pred(I) x J}
        const DyadicRectangle xroot{r.x, DyadicInterval::unit()};
        const DyadicRectangle pred = r.pred_x();
        std::vector<DyadicInterval> xsides;
        for (const auto& mem : prefix.members(xroot)) xsides.push_back(mem.rect.x);
        // members of the predecessor grouped by x-side
        const auto& pmem = prefix.members(pred);
        for (const auto& k0 : xsides) {
            for (const auto& mem : pmem) {
                if (!mem.rect.x.contains(k0)) continue;
                std::vector<DyadicInterval> ls;
                tiles_into(mem.rect.y, m, ls);
                for (const auto& l : ls) face.push_back({k0, l});
            }
        }
    }
    std::sort(face.begin(), face.end(), [](const auto& a, const auto& b) {
        return ordering_index(a) < ordering_index(b);
    });
    return face;
}

double offdiag_bound(const OperatorMatrix& t, const std::vector<DyadicRectangle>& face,
                     const BlockFamily& prior) {
    double total = 0.0;
    for (const auto& [index, members] : prior.blocks()) {
        for (const auto& cand : face) {
            const OrderingIndex ci = ordering_index(cand);
            double img = 0.0, coimg = 0.0;
            for (const auto& mem : members) {
                const OrderingIndex mi = ordering_index(mem.rect);
                img += mem.weight * t.entry(ci, mi);
                coimg += mem.weight * t.entry(mi, ci);
            }
            total += std::abs(img) + std::abs(coimg);
        }
    }
    return total;
}

namespace {

struct PairSystem {
    std::vector<std::tuple<int, int, double>> pairs;  // a < b, weight
    double l2_sq = 0.0;
    double diag_sum = 0.0;  // sum over members of <T h_R, h_R>

    double x_of(const std::vector<int>& signs) const {
        double x = 0.0;
        for (const auto& [a, b, w] : pairs) x += signs[a] * signs[b] * w;
        return x;
    }
};

PairSystem pair_system(const OperatorMatrix& t, const std::vector<DyadicRectangle>& face) {
    PairSystem ps;
    std::map<OrderingIndex, int> pos;
    for (std::size_t a = 0; a < face.size(); ++a)
        pos.emplace(ordering_index(face[a]), static_cast<int>(a));
    std::map<std::pair<int, int>, double> acc;
    for (std::size_t a = 0; a < face.size(); ++a) {
        const OrderingIndex ia = ordering_index(face[a]);
        ps.l2_sq += face[a].measure();
        ps.diag_sum += t.entry(ia, ia);
        // column of a: entries <T h_a, h_row>; pair term uses rows inside the face
        for (const auto& [row, val] : t.column(ia)) {
            if (row == ia) continue;
            auto it = pos.find(row);
            if (it == pos.end()) continue;
            const int b = it->second;
            const int lo = std::min<int>(static_cast<int>(a), b);
            const int hi = std::max<int>(static_cast<int>(a), b);
            acc[{lo, hi}] += val;
        }
    }
    ps.pairs.reserve(acc.size());
    for (const auto& [ab, w] : acc)
        if (w != 0.0) ps.pairs.emplace_back(ab.first, ab.second, w);
    return ps;
}

}  // namespace

SignSearchResult sign_search(const OperatorMatrix& t,
                             const std::vector<DyadicRectangle>& face, double eta,
                             int budget, std::uint64_t seed) {
    if (face.empty()) throw std::invalid_argument("sign_search: empty candidate family");
    const PairSystem ps = pair_system(t, face);
    const double threshold = eta * ps.l2_sq;
    const int n = static_cast<int>(face.size());

    SignSearchResult res;
    res.sample.signs.assign(face.size(), 1);
    res.sample.x_value = ps.x_of(res.sample.signs);

    if (n <= 16) {
        res.exhaustive = true;
        std::vector<int> signs(face.size(), 1);
        double best = std::abs(res.sample.x_value);
        std::vector<int> best_signs = signs;
        const std::uint64_t total = std::uint64_t{1} << (n - 1);  // X(eps) = X(-eps)
        for (std::uint64_t mask = 0; mask < total; ++mask) {
            for (int k = 0; k + 1 < n; ++k)
                signs[static_cast<std::size_t>(k) + 1] = (mask >> k) & 1 ? -1 : 1;
            const double x = ps.x_of(signs);
            if (std::abs(x) < best) {
                best = std::abs(x);
                best_signs = signs;
            }
        }
        res.tried = total;
        res.sample.signs = best_signs;
        res.sample.x_value = ps.x_of(best_signs);
        res.ok = std::abs(res.sample.x_value) <= threshold;
        return res;
    }

    Rng rng(seed);
    double best = std::numeric_limits<double>::infinity();
    std::vector<int> signs(face.size(), 1);
    for (int trial = 0; trial < budget; ++trial) {
        for (auto& s : signs) s = (rng.next_u64() & 1) ? -1 : 1;
        const double x = ps.x_of(signs);
        ++res.tried;
        if (std::abs(x) < best) {
            best = std::abs(x);
            res.sample.signs = signs;
            res.sample.x_value = x;
        }
        if (best <= threshold) break;
    }
    res.ok = best <= threshold;
    return res;
}

SignEnsembleStats sign_ensemble_stats(const OperatorMatrix& t,
                                      const std::vector<DyadicRectangle>& face) {
    if (face.empty() || face.size() > 16)
        throw std::invalid_argument("sign_ensemble_stats: need 1..16 members");
    const PairSystem ps = pair_system(t, face);
    const int n = static_cast<int>(face.size());
    SignEnsembleStats st;
    std::vector<int> signs(face.size(), 1);
    const std::uint64_t total = std::uint64_t{1} << n;
    double sum = 0.0, sum2 = 0.0;
    std::vector<double> xs;
    xs.reserve(total);
    for (std::uint64_t mask = 0; mask < total; ++mask) {
        for (int k = 0; k < n; ++k)
            signs[static_cast<std::size_t>(k)] = (mask >> k) & 1 ? -1 : 1;
        const double x = ps.x_of(signs);
        sum += x;
        sum2 += x * x;
        xs.push_back(x);
    }
    st.count = total;
    st.mean = sum / static_cast<double>(total);
    st.second_moment = sum2 / static_cast<double>(total);
    st.values = std::move(xs);
    return st;
}

Builder::Builder(const OperatorMatrix& t, const ConstructionParams& params)
    : t_(t), params_(params), family_(params.depth) {
    params_.validate();
    if (t.depth() < params.depth)
        throw std::invalid_argument("construction: operator shallower than requested depth");
}

void Builder::init_state() {
    const DyadicRectangle unit = DyadicRectangle::unit();
    commit_block(unit, {unit}, {1});
    StepDiagnostics d;
    d.index = 0;
    d.rect = unit;
    d.case_id = 0;
    d.m_chosen = 0;
    d.m_min = 0;
    d.family_size = 1;
    d.l2_sq = 1.0;
    d.exhaustive = true;
    d.samples_tried = 1;
    d.diag_ratio = t_.entry(OrderingIndex{0}, OrderingIndex{0});
    d.diag_ok = std::abs(d.diag_ratio) >= params_.delta - params_.eta_or_default() - 1e-12;
    steps_.push_back(d);
}

void Builder::commit_block(const DyadicRectangle& rect,
                           const std::vector<DyadicRectangle>& face,
                           const std::vector<int>& signs) {
    std::vector<BlockMember> members;
    members.reserve(face.size());
    for (std::size_t k = 0; k < face.size(); ++k)
        members.push_back({face[k], static_cast<double>(signs[k])});
    family_.add_block(rect, members);

    // incremental pairing maps for the off-diagonal majorant
    std::map<OrderingIndex, double> img, coimg;
    for (std::size_t k = 0; k < face.size(); ++k) {
        const OrderingIndex mi = ordering_index(face[k]);
        const double w = signs[k];
        for (const auto& [row, val] : t_.column(mi)) img[row] += w * val;
        for (const auto& [col, val] : t_.row(mi)) coimg[col] += w * val;
    }
    img_.push_back(std::move(img));
    coimg_.push_back(std::move(coimg));
}

struct Builder::Attempt {
    bool feasible = false;       // nonempty candidate family
    bool off_ok = false;
    bool sign_ok = false;
    int m = 0;
    std::vector<DyadicRectangle> face;
    std::vector<int> signs;
    double l2_sq = 0.0;
    double offdiag = 0.0;
    double off_threshold = 0.0;
    double x_value = 0.0;
    double x_threshold = 0.0;
    bool exhaustive = false;
    std::uint64_t tried = 0;
    bool restricted = false;
    double score() const {
        if (!feasible) return std::numeric_limits<double>::infinity();
        const double a = off_threshold > 0.0 ? offdiag / off_threshold
                                             : (offdiag > 0.0 ? 1e300 : 0.0);
        const double b = x_threshold > 0.0 ? std::abs(x_value) / x_threshold
                                           : (std::abs(x_value) > 0.0 ? 1e300 : 0.0);
        return std::max(a, b);
    }
};

Builder::Attempt Builder::try_frequency(OrderingIndex i, int m, double eta) {
    Attempt at;
    at.m = m;
    std::vector<DyadicRectangle> face = candidate_frequencies(family_, i, m);
    if (face.empty()) return at;

    // restrict to the majority diagonal sign (by measure) before searching
    double pos_meas = 0.0, neg_meas = 0.0;
    for (const auto& r : face) {
        const OrderingIndex ri = ordering_index(r);
        const double alpha = t_.entry(ri, ri);
        (alpha >= 0.0 ? pos_meas : neg_meas) += r.measure();
    }
    if (pos_meas > 0.0 && neg_meas > 0.0) {
        const bool keep_positive = pos_meas >= neg_meas;
        std::vector<DyadicRectangle> kept;
        for (const auto& r : face) {
            const OrderingIndex ri = ordering_index(r);
            const double alpha = t_.entry(ri, ri);
            if ((alpha >= 0.0) == keep_positive) kept.push_back(r);
        }
        face.swap(kept);
        at.restricted = true;
    }
    if (face.empty()) return at;
    at.feasible = true;

    at.l2_sq = 0.0;
    for (const auto& r : face) at.l2_sq += r.measure();

    // off-diagonal majorant against all prior blocks, via the cached maps
    double off = 0.0;
    for (std::size_t j = 0; j < img_.size(); ++j) {
        for (const auto& r : face) {
            const OrderingIndex ri = ordering_index(r);
            auto it = img_[j].find(ri);
            if (it != img_[j].end()) off += std::abs(it->second);
            auto it2 = coimg_[j].find(ri);
            if (it2 != coimg_[j].end()) off += std::abs(it2->second);
        }
    }
    at.offdiag = off;
    at.off_threshold = eta * std::ldexp(1.0, -2 * static_cast<int>(std::min<std::uint64_t>(
                                                     i, 500))) *
                       at.l2_sq;
    at.off_ok = off <= at.off_threshold;

    const std::uint64_t step_seed =
        hash_combine(hash_combine(params_.seed, i), static_cast<std::uint64_t>(m));
    const SignSearchResult sr =
        sign_search(t_, face, eta, params_.sign_budget, step_seed);
    at.signs = sr.sample.signs;
    at.x_value = sr.sample.x_value;
    at.x_threshold = eta * at.l2_sq;
    at.sign_ok = sr.ok;
    at.exhaustive = sr.exhaustive;
    at.tried = sr.tried;
    at.face = std::move(face);
    return at;
}

StepDiagnostics Builder::step(OrderingIndex i) {
    if (i != family_.size())
        throw std::invalid_argument("construction: steps must be taken in order");
    const double eta = params_.eta_or_default();
    const DyadicRectangle rect = rectangle_at(i);

    // structural floor for the frequency search
    int m_lo = 1;
    int case_id;
    if (rect.y.is_unit()) {
        case_id = 1;
        int g = 0;
        for (const auto& mem : family_.members(rect.pred_x()))
            g = std::max(g, mem.rect.x.level);
        m_lo = g + 1;
    } else if (rect.x.is_unit()) {
        case_id = 2;
        int g = 0;
        for (const auto& mem : family_.members(rect.pred_y()))
            g = std::max(g, mem.rect.y.level);
        m_lo = g + 1;
    } else {
        case_id = 3;
        int g = 0;
        for (const auto& mem : family_.members(rect.pred_x()))
            g = std::max(g, mem.rect.y.level);
        // strictly refine the y-granularity of the same-column predecessor
        // B_{I x pred(J)} so the extracted Y families stay nested
        int gp = 0;
        for (const auto& mem : family_.members(rect.pred_y()))
            gp = std::max(gp, mem.rect.y.level);
        m_lo = std::max(g, gp + 1);
    }

    Attempt best;
    Attempt accepted;
    bool have_accepted = false;
    for (int m = m_lo; m <= params_.depth; ++m) {
        Attempt at = try_frequency(i, m, eta);
        if (!at.feasible) continue;
        if (at.off_ok && at.sign_ok) {
            accepted = std::move(at);
            have_accepted = true;
            break;
        }
        if (at.score() < best.score()) best = std::move(at);
    }

    StepDiagnostics d;
    d.index = i;
    d.rect = rect;
    d.case_id = case_id;
    d.m_min = m_lo;

    if (!have_accepted) {
        if (!best.feasible)
            throw std::runtime_error("construction: no admissible frequency for " +
                                     rect.str() + " at depth " +
                                     std::to_string(params_.depth));
        accepted = std::move(best);
        d.relaxed = true;
        d.relax_reason = accepted.off_ok
                             ? "sign budget exhausted at every frequency"
                             : "off-diagonal bound unattainable at this depth";
    }

    d.m_chosen = accepted.m;
    d.family_size = accepted.face.size();
    d.l2_sq = accepted.l2_sq;
    d.offdiag_value = accepted.offdiag;
    d.offdiag_threshold = accepted.off_threshold;
    d.x_value = accepted.x_value;
    d.x_threshold = accepted.x_threshold;
    d.exhaustive = accepted.exhaustive;
    d.samples_tried = accepted.tried;
    d.majority_restricted = accepted.restricted;

    // diagonal pairing <T b_i, b_i> = sum_a <T h_a, h_a> + X(eps) over the face
    double diag = accepted.x_value;
    for (const auto& r : accepted.face) {
        const OrderingIndex ri = ordering_index(r);
        diag += t_.entry(ri, ri);
    }
    d.diag_ratio = diag / accepted.l2_sq;
    d.diag_ok = std::abs(d.diag_ratio) >= params_.delta - eta - 1e-12;

    commit_block(rect, accepted.face, accepted.signs);
    steps_.push_back(d);
    return d;
}

ConstructionResult Builder::take_result() && {
    return {std::move(family_), std::move(steps_)};
}

ConstructionResult build(const OperatorMatrix& t, const ConstructionParams& params) {
    Builder b(t, params);
    b.init_state();
    for (OrderingIndex i = 1; i < static_cast<OrderingIndex>(params.n_steps); ++i)
        b.step(i);
    return std::move(b).take_result();
}

std::vector<std::vector<double>> block_pairings(const OperatorMatrix& t,
                                                const BlockFamily& fam) {
    const auto& blocks = fam.blocks();
    const std::size_t n = blocks.size();
    // img[j]: row -> <T b_j, h_row>
    std::vector<std::map<OrderingIndex, double>> img(n);
    for (std::size_t j = 0; j < n; ++j)
        for (const auto& mem : blocks[j].second) {
            const OrderingIndex mi = ordering_index(mem.rect);
            for (const auto& [row, val] : t.column(mi))
                img[j][row] += mem.weight * val;
        }
    std::vector<std::vector<double>> p(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            double s = 0.0;
            for (const auto& mem : blocks[i].second) {
                auto it = img[j].find(ordering_index(mem.rect));
                if (it != img[j].end()) s += mem.weight * it->second;
            }
            p[i][j] = s;
        }
    return p;
}

double almost_diag_check(const OperatorMatrix& t, const BlockFamily& fam) {
    const auto& blocks = fam.blocks();
    const std::size_t n = blocks.size();
    if (n == 0) return 0.0;
    const auto p = block_pairings(t, fam);
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            s += static_cast<double>(ordering_index(blocks[j].first)) * std::abs(p[i][j]);
        }
        const double nsq = block_l2_norm_sq(blocks[i].second);
        worst = std::max(worst, s / nsq);
    }
    return worst;
}

}  // namespace hpq
