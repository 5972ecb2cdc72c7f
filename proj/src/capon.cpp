#include "hpq/capon.hpp"

#include <algorithm>
#include <bit>

#include "hpq/blocks.hpp"

namespace hpq {

CellSet CellSet::full(int depth) {
    CellSet s(depth);
    s.set_interval(DyadicInterval::unit());
    return s;
}

CellSet CellSet::from_interval(const DyadicInterval& iv, int depth) {
    CellSet s(depth);
    s.set_interval(iv);
    return s;
}

void CellSet::set_interval(const DyadicInterval& iv) {
    if (iv.level > depth_)
        throw std::invalid_argument("CellSet: interval finer than the cell grid");
    const std::int64_t lo = iv.pos << (depth_ - iv.level);
    const std::int64_t hi = (iv.pos + 1) << (depth_ - iv.level);
    for (std::int64_t c = lo; c < hi; ++c)
        bits_[static_cast<std::size_t>(c) >> 6] |= std::uint64_t{1} << (c & 63);
}

bool CellSet::test(std::int64_t cell) const {
    return (bits_[static_cast<std::size_t>(cell) >> 6] >> (cell & 63)) & 1u;
}

std::int64_t CellSet::cell_count() const {
    std::int64_t n = 0;
    for (std::uint64_t w : bits_) n += std::popcount(w);
    return n;
}

CellSet& CellSet::operator&=(const CellSet& o) {
    for (std::size_t i = 0; i < bits_.size(); ++i) bits_[i] &= o.bits_[i];
    return *this;
}

CellSet& CellSet::operator|=(const CellSet& o) {
    for (std::size_t i = 0; i < bits_.size(); ++i) bits_[i] |= o.bits_[i];
    return *this;
}

bool CellSet::intersects(const CellSet& o) const {
    for (std::size_t i = 0; i < bits_.size(); ++i)
        if (bits_[i] & o.bits_[i]) return true;
    return false;
}

bool CellSet::subset_of(const CellSet& o) const {
    for (std::size_t i = 0; i < bits_.size(); ++i)
        if (bits_[i] & ~o.bits_[i]) return false;
    return true;
}

std::int64_t CellSet::intersection_count(const CellSet& o) const {
    std::int64_t n = 0;
    for (std::size_t i = 0; i < bits_.size(); ++i)
        n += std::popcount(bits_[i] & o.bits_[i]);
    return n;
}

Ratio::Ratio(std::int64_t n, std::int64_t d) : num(n), den(d) {
    if (den <= 0 || num < 0) throw std::invalid_argument("Ratio: nonpositive parts");
    const std::int64_t g = std::gcd(num, den);
    if (g > 1) {
        num /= g;
        den /= g;
    }
}

std::vector<DyadicInterval> CaponStructure::x_keys() const {
    std::vector<DyadicInterval> out;
    out.reserve(x_families.size());
    for (const auto& [i, fam] : x_families) out.push_back(i);
    return out;
}

std::vector<DyadicInterval> CaponStructure::j_keys() const {
    std::vector<DyadicInterval> out;
    for (const auto& [jk, fam] : y_families)
        if (out.empty() || out.back() != jk.first) {
            if (std::find(out.begin(), out.end(), jk.first) == out.end())
                out.push_back(jk.first);
        }
    std::sort(out.begin(), out.end());
    return out;
}

CellSet CaponStructure::x_set(const DyadicInterval& i) const {
    CellSet s(depth);
    auto it = x_families.find(i);
    if (it != x_families.end())
        for (const auto& k : it->second) s.set_interval(k);
    return s;
}

CellSet CaponStructure::y_set(const DyadicInterval& j, const DyadicInterval& k) const {
    CellSet s(depth);
    auto it = y_families.find({j, k});
    if (it != y_families.end())
        for (const auto& l : it->second) s.set_interval(l);
    return s;
}

bool CaponStructure::has_y(const DyadicInterval& j, const DyadicInterval& k) const {
    return y_families.count({j, k}) > 0;
}

CaponStructure CaponStructure::restricted(int new_depth) const {
    CaponStructure out;
    out.depth = new_depth;
    auto shallow = [new_depth](const DyadicInterval& iv) { return iv.level <= new_depth; };
    for (const auto& [i, fam] : x_families) {
        if (!shallow(i)) continue;
        std::vector<DyadicInterval> kept;
        for (const auto& k : fam)
            if (shallow(k)) kept.push_back(k);
        if (!kept.empty()) out.x_families[i] = kept;
    }
    for (const auto& [jk, fam] : y_families) {
        if (!shallow(jk.first) || !shallow(jk.second)) continue;
        std::vector<DyadicInterval> kept;
        for (const auto& l : fam)
            if (shallow(l)) kept.push_back(l);
        if (!kept.empty()) out.y_families[jk] = kept;
    }
    return out;
}

std::pair<CellSet, CellSet> derived_sets(const CaponStructure& s, const DyadicInterval& j,
                                         std::int64_t x_cell) {
    bool any = false;
    CellSet inter = CellSet::full(s.depth);
    CellSet uni(s.depth);
    for (const auto& [jk, fam] : s.y_families) {
        if (jk.first != j) continue;
        const DyadicInterval& k = jk.second;
        const std::int64_t lo = k.pos << (s.depth - k.level);
        const std::int64_t hi = (k.pos + 1) << (s.depth - k.level);
        if (x_cell < lo || x_cell >= hi) continue;
        any = true;
        const CellSet ys = s.y_set(j, k);
        inter &= ys;
        uni |= ys;
    }
    if (!any) return {CellSet::full(s.depth), CellSet(s.depth)};
    return {inter, uni};
}

namespace {

struct Checker {
    const CaponStructure& s;
    CaponReport rep;
    Ratio cx{1, 1}, cy{1, 1};

    void violate(const std::string& cond, const std::string& witness) {
        if (rep.violations.size() < 64) rep.violations.push_back({cond, witness});
    }

    void bump(Ratio& c, std::int64_t num, std::int64_t den, const char* cond,
              const std::string& witness) {
        if (num > 0 && den == 0) {
            violate(cond, witness + " (ratio unbounded)");
            return;
        }
        if (den == 0) return;
        Ratio r(num, den);
        if (c < r) c = r;
    }

    static bool pairwise_disjoint(const std::vector<DyadicInterval>& fam,
                                  std::string* bad) {
        for (std::size_t a = 0; a < fam.size(); ++a)
            for (std::size_t b = a + 1; b < fam.size(); ++b)
                if (!intervals_disjoint(fam[a], fam[b])) {
                    if (bad) *bad = fam[a].str() + " vs " + fam[b].str();
                    return false;
                }
        return true;
    }

    void check_x() {
        const auto keys = s.x_keys();
        // X1: members pairwise disjoint, families pairwise disjoint as sets
        std::map<DyadicInterval, DyadicInterval> owner;
        for (const auto& i : keys) {
            const auto& fam = s.x_families.at(i);
            std::string bad;
            if (!pairwise_disjoint(fam, &bad))
                violate("X1", "X_" + i.str() + " members overlap: " + bad);
            for (const auto& k : fam) {
                auto [it, inserted] = owner.try_emplace(k, i);
                if (!inserted && it->second != i)
                    violate("X1", k.str() + " in both X_" + it->second.str() +
                                      " and X_" + i.str());
            }
        }
        // X2: member containment reflects index containment
        for (const auto& i0 : keys) {
            for (const auto& i1 : keys) {
                const auto& f0 = s.x_families.at(i0);
                const auto& f1 = s.x_families.at(i1);
                for (const auto& k0 : f0)
                    for (const auto& k1 : f1)
                        if (k1.contains(k0) && !i1.contains(i0))
                            violate("X2", k0.str() + " in " + k1.str() + " but " +
                                              i0.str() + " not in " + i1.str());
                if (i1.contains(i0)) {
                    for (const auto& k0 : f0) {
                        int hits = 0;
                        for (const auto& k1 : f1)
                            if (k1.contains(k0)) ++hits;
                        if (hits != 1)
                            violate("X2", "member " + k0.str() + " of X_" + i0.str() +
                                              " covered " + std::to_string(hits) +
                                              " times in X_" + i1.str());
                    }
                }
            }
        }
        // X3: sibling splits
        for (const auto& i : keys) {
            if (i.level >= s.depth) continue;
            const auto [l, r] = i.halves();
            if (!s.x_families.count(l) || !s.x_families.count(r)) continue;
            const CellSet xl = s.x_set(l), xr = s.x_set(r), xi = s.x_set(i);
            if (xl.intersects(xr))
                violate("X3", "X_" + l.str() + " meets X_" + r.str());
            CellSet un = xl;
            un |= xr;
            if (!un.subset_of(xi))
                violate("X3", "X_" + l.str() + " + X_" + r.str() + " not inside X_" +
                                  i.str());
        }
        // X4: measure comparability
        for (const auto& i : keys) {
            const std::int64_t xi = s.x_set(i).cell_count();
            const std::int64_t ii = std::int64_t{1} << (s.depth - i.level);
            if (xi == 0) {
                violate("X4", "X_" + i.str() + " is empty");
                continue;
            }
            bump(cx, xi, ii, "X4", "X_" + i.str());
            bump(cx, ii, xi, "X4", "X_" + i.str());
        }
        // X5: members of coarser families meet finer X sets proportionally
        for (const auto& i0 : keys) {
            const CellSet x0 = s.x_set(i0);
            const std::int64_t x0c = x0.cell_count();
            if (x0c == 0) continue;
            for (const auto& i : keys) {
                if (!i.contains(i0)) continue;
                const CellSet xi = s.x_set(i);
                const std::int64_t xic = xi.cell_count();
                for (const auto& k : s.x_families.at(i)) {
                    const CellSet kc = CellSet::from_interval(k, s.depth);
                    const std::int64_t kcells = kc.cell_count();
                    const std::int64_t hit = kc.intersection_count(x0);
                    // |X_I0| * |K| <= C |X_I| * |K ^ X_I0|
                    bump(cx, x0c * kcells, xic * hit, "X5",
                         "I0=" + i0.str() + " I=" + i.str() + " K=" + k.str());
                }
            }
        }
    }

    void check_y() {
        std::vector<std::pair<DyadicInterval, DyadicInterval>> yk;
        for (const auto& [jk, fam] : s.y_families) yk.push_back(jk);
        const auto jkeys = s.j_keys();

        // Y1
        std::map<DyadicInterval, std::map<DyadicInterval, DyadicInterval>> owner_by_k;
        for (const auto& jk : yk) {
            const auto& fam = s.y_families.at(jk);
            std::string bad;
            if (!pairwise_disjoint(fam, &bad))
                violate("Y1", "Y_" + jk.first.str() + "(" + jk.second.str() +
                                  ") members overlap: " + bad);
            auto& owner = owner_by_k[jk.second];
            for (const auto& l : fam) {
                auto [it, inserted] = owner.try_emplace(l, jk.first);
                if (!inserted && it->second != jk.first)
                    violate("Y1", l.str() + " in both Y_" + it->second.str() + "(" +
                                      jk.second.str() + ") and Y_" + jk.first.str() +
                                      "(" + jk.second.str() + ")");
            }
        }
        // Y2: fixed K, containment of members reflects containment of J's
        for (const auto& jk0 : yk) {
            for (const auto& jk1 : yk) {
                if (jk0.second != jk1.second) continue;
                const auto& f0 = s.y_families.at(jk0);
                const auto& f1 = s.y_families.at(jk1);
                for (const auto& l0 : f0)
                    for (const auto& l1 : f1)
                        if (l1.contains(l0) && !jk1.first.contains(jk0.first))
                            violate("Y2", l0.str() + " in " + l1.str() + " but " +
                                              jk0.first.str() + " not in " +
                                              jk1.first.str());
                if (jk1.first.contains(jk0.first)) {
                    for (const auto& l0 : f0) {
                        int hits = 0;
                        for (const auto& l1 : f1)
                            if (l1.contains(l0)) ++hits;
                        if (hits != 1)
                            violate("Y2", "member " + l0.str() + " of Y_" +
                                              jk0.first.str() + "(" + jk0.second.str() +
                                              ") covered " + std::to_string(hits) +
                                              " times in Y_" + jk1.first.str());
                    }
                }
            }
        }
        // Y3 / Y4 per x-cell through the derived sets
        const std::int64_t cells = std::int64_t{1} << s.depth;
        std::vector<bool> ever_uncovered(static_cast<std::size_t>(cells), false);
        for (const auto& j : jkeys) {
            std::vector<CellSet> small_sets, large_sets;
            std::vector<bool> uncovered_mark(static_cast<std::size_t>(cells), false);
            small_sets.reserve(cells);
            for (std::int64_t x = 0; x < cells; ++x) {
                auto [small, large] = derived_sets(s, j, x);
                if (large.none() && small == CellSet::full(s.depth)) {
                    uncovered_mark[static_cast<std::size_t>(x)] = true;
                    ever_uncovered[static_cast<std::size_t>(x)] = true;
                    small_sets.push_back(small);
                    large_sets.push_back(large);
                    continue;  // excluded from the Y4 lower bound
                }
                const std::int64_t jj = std::int64_t{1} << (s.depth - j.level);
                bump(cy, jj, small.cell_count(), "Y4",
                     "J=" + j.str() + " x-cell " + std::to_string(x));
                bump(cy, large.cell_count(), jj, "Y4",
                     "J=" + j.str() + " x-cell " + std::to_string(x));
                small_sets.push_back(small);
                large_sets.push_back(large);
            }
            if (j.level >= s.depth) continue;
            const auto [j0, j1] = j.halves();
            const bool have0 = std::any_of(yk.begin(), yk.end(),
                                           [&](const auto& jk) { return jk.first == j0; });
            const bool have1 = std::any_of(yk.begin(), yk.end(),
                                           [&](const auto& jk) { return jk.first == j1; });
            if (!have0 || !have1) continue;
            for (std::int64_t x = 0; x < cells; ++x) {
                if (uncovered_mark[static_cast<std::size_t>(x)]) continue;
                auto [s0, u0] = derived_sets(s, j0, x);
                auto [s1, u1] = derived_sets(s, j1, x);
                const bool c0 = !u0.none();
                const bool c1 = !u1.none();
                const std::string w = "J=" + j.str() + " x-cell " + std::to_string(x);
                if (c0 && c1 && s0.intersects(s1)) violate("Y3", w + " small sets meet");
                if (u0.intersects(u1)) violate("Y3", w + " large sets meet");
                CellSet su = c0 ? s0 : CellSet(s.depth);
                if (c1) su |= s1;
                if (c0 || c1) {
                    if (!su.subset_of(small_sets[static_cast<std::size_t>(x)]))
                        violate("Y3", w + " small union escapes");
                }
                CellSet uu = u0;
                uu |= u1;
                if (!uu.subset_of(large_sets[static_cast<std::size_t>(x)]))
                    violate("Y3", w + " large union escapes");
            }
        }
        for (std::int64_t x = 0; x < cells; ++x)
            if (ever_uncovered[static_cast<std::size_t>(x)])
                rep.uncovered_cells.push_back(x);

        // Y5: quantified over keyed pairs with nested x-owners and nested J's
        std::map<DyadicInterval, DyadicInterval> owner;
        for (const auto& [i, fam] : s.x_families)
            for (const auto& k : fam) owner.emplace(k, i);
        for (const auto& jk : yk) {          // (J, K)
            const auto oit = owner.find(jk.second);
            if (oit == owner.end()) continue;
            const DyadicInterval i_of_k = oit->second;
            const CellSet yjk = s.y_set(jk.first, jk.second);
            const std::int64_t yjkc = yjk.cell_count();
            for (const auto& jk0 : yk) {     // (J0, K0)
                if (!jk.first.contains(jk0.first)) continue;
                const auto oit0 = owner.find(jk0.second);
                if (oit0 == owner.end()) continue;
                if (!i_of_k.contains(oit0->second)) continue;
                const CellSet y0 = s.y_set(jk0.first, jk0.second);
                const std::int64_t y0c = y0.cell_count();
                if (y0c == 0) continue;
                for (const auto& l : s.y_families.at(jk)) {
                    const CellSet lc = CellSet::from_interval(l, s.depth);
                    const std::int64_t lcells = lc.cell_count();
                    const std::int64_t hit = lc.intersection_count(y0);
                    // |Y_J0(K0)| * |L| <= C |Y_J(K)| * |L ^ Y_J0(K0)|
                    bump(cy, y0c * lcells, yjkc * hit, "Y5",
                         "J0=" + jk0.first.str() + " K0=" + jk0.second.str() + " J=" +
                             jk.first.str() + " K=" + jk.second.str() + " L=" + l.str());
                }
            }
        }
    }
};

}  // namespace

CaponReport check(const CaponStructure& s) {
    Checker ch{s, {}, {1, 1}, {1, 1}};
    ch.rep.checked_depth = s.depth;
    ch.check_x();
    ch.check_y();
    ch.rep.ok = ch.rep.violations.empty();
    ch.rep.c_x = ch.cx;
    ch.rep.c_y = ch.cy;
    return ch.rep;
}

CaponStructure from_block_family(const BlockFamily& fam) {
    CaponStructure s;
    s.depth = fam.depth();
    // group members of each block by x-side
    for (const auto& [rect, members] : fam.blocks()) {
        const DyadicInterval i = rect.x;
        const DyadicInterval j = rect.y;
        std::map<DyadicInterval, std::vector<DyadicInterval>> by_k;
        for (const auto& m : members) by_k[m.rect.x].push_back(m.rect.y);
        std::vector<DyadicInterval> xsides;
        for (const auto& [k, ls] : by_k) xsides.push_back(k);
        auto it = s.x_families.find(i);
        if (it == s.x_families.end()) {
            s.x_families.emplace(i, xsides);
        } else if (it->second != xsides) {
            throw std::invalid_argument(
                "not product-structured: x-sides of B_" + rect.str() +
                " differ from earlier blocks with the same x-index " + i.str());
        }
        for (auto& [k, ls] : by_k) {
            std::sort(ls.begin(), ls.end());
            auto [yit, inserted] = s.y_families.try_emplace({j, k}, ls);
            if (!inserted && yit->second != ls)
                throw std::invalid_argument(
                    "not product-structured: Y_" + j.str() + "(" + k.str() +
                    ") inconsistent across blocks");
        }
    }
    return s;
}

BlockFamily to_block_family(const CaponStructure& s) {
    BlockFamily fam(s.depth);
    for (const auto& [i, xfam] : s.x_families) {
        // blocks exist for every J keyed with every K of this I
        std::vector<DyadicInterval> js;
        for (const auto& [jk, ls] : s.y_families)
            if (std::find(xfam.begin(), xfam.end(), jk.second) != xfam.end())
                if (std::find(js.begin(), js.end(), jk.first) == js.end())
                    js.push_back(jk.first);
        std::sort(js.begin(), js.end());
        for (const auto& j : js) {
            std::vector<BlockMember> members;
            for (const auto& k : xfam) {
                auto it = s.y_families.find({j, k});
                if (it == s.y_families.end()) continue;
                for (const auto& l : it->second)
                    members.push_back({DyadicRectangle{k, l}, 1.0});
            }
            if (!members.empty()) fam.add_block({i, j}, std::move(members));
        }
    }
    return fam;
}

CaponStructure trivial_structure(int depth) {
    CaponStructure s;
    s.depth = depth;
    for (int k = 0; k <= depth; ++k)
        for (std::int64_t j = 0; j < (std::int64_t{1} << k); ++j)
            s.x_families[{k, j}] = {DyadicInterval{k, j}};
    for (int kj = 0; kj <= depth; ++kj)
        for (std::int64_t jj = 0; jj < (std::int64_t{1} << kj); ++jj)
            for (int kk = 0; kk <= depth; ++kk)
                for (std::int64_t jk = 0; jk < (std::int64_t{1} << kk); ++jk)
                    s.y_families[{{kj, jj}, {kk, jk}}] = {DyadicInterval{kj, jj}};
    return s;
}

}  // namespace hpq
