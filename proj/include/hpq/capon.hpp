#pragma once

#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "hpq/dyadic.hpp"

namespace hpq {

class BlockFamily;

// Subset of [0,1) resolved on the 2^-depth cell grid.
class CellSet {
  public:
    explicit CellSet(int depth = 0)
        : depth_(depth), bits_((std::size_t{1} << depth) / 64 + 1, 0) {}

    static CellSet full(int depth);
    static CellSet from_interval(const DyadicInterval& iv, int depth);

    int depth() const { return depth_; }
    std::int64_t cell_count() const;  // number of cells set
    double measure() const { return std::ldexp(static_cast<double>(cell_count()), -depth_); }
    bool none() const { return cell_count() == 0; }

    void set_interval(const DyadicInterval& iv);
    bool test(std::int64_t cell) const;

    CellSet& operator&=(const CellSet& o);
    CellSet& operator|=(const CellSet& o);
    bool intersects(const CellSet& o) const;
    bool subset_of(const CellSet& o) const;
    std::int64_t intersection_count(const CellSet& o) const;

    friend bool operator==(const CellSet&, const CellSet&) = default;

  private:
    int depth_;
    std::vector<std::uint64_t> bits_;
};

// Exact ratio of integers, kept reduced; constants from the checker are exact
// maxima of dyadic-rational ratios.
struct Ratio {
    std::int64_t num = 1;
    std::int64_t den = 1;

    Ratio() = default;
    Ratio(std::int64_t n, std::int64_t d);
    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
    bool is_one() const { return num == den; }
    friend bool operator<(const Ratio& a, const Ratio& b) {
        return a.num * b.den < b.num * a.den;
    }
    friend bool operator==(const Ratio& a, const Ratio& b) = default;
};

struct CaponStructure {
    int depth = 0;
    // X_I families, keyed by I
    std::map<DyadicInterval, std::vector<DyadicInterval>> x_families;
    // Y_J(K) families, keyed by (J, K)
    std::map<std::pair<DyadicInterval, DyadicInterval>, std::vector<DyadicInterval>>
        y_families;

    std::vector<DyadicInterval> x_keys() const;
    std::vector<DyadicInterval> j_keys() const;
    CellSet x_set(const DyadicInterval& i) const;  // union of the X_I members
    CellSet y_set(const DyadicInterval& j, const DyadicInterval& k) const;
    bool has_y(const DyadicInterval& j, const DyadicInterval& k) const;

    // drop all keys referencing intervals deeper than new_depth
    CaponStructure restricted(int new_depth) const;
};

struct CaponViolation {
    std::string condition;  // "X1".."X5", "Y1".."Y5"
    std::string witness;
};

struct CaponReport {
    bool ok = false;
    Ratio c_x, c_y;                        // minimal constants when ok
    std::vector<CaponViolation> violations;
    int checked_depth = 0;
    // x-cells skipped by the Y4 lower bound because no keyed K covers them
    std::vector<std::int64_t> uncovered_cells;
};

// Y_{J,x} (intersection, full interval when nothing is keyed over x) and
// Y_J^x (union, empty in that case), both resolved on the cell grid.
std::pair<CellSet, CellSet> derived_sets(const CaponStructure& s, const DyadicInterval& j,
                                         std::int64_t x_cell);

// Verify (X1)-(X5) and (Y1)-(Y5) over every keyed combination and every
// x-cell; compute the minimal constants as exact rational maxima.
CaponReport check(const CaponStructure& s);

// Extract the X_I / Y_J(K) families from a block family.  Throws
// std::invalid_argument("not product-structured...") when the x-side sets of
// B_{I x J} are inconsistent across J for the same I.
CaponStructure from_block_family(const BlockFamily& fam);

// Sign-(+1) block family realizing the structure; inverse of
// from_block_family on product families.
BlockFamily to_block_family(const CaponStructure& s);

// X_I = {I}, Y_J(K) = {J} down to the given depth
CaponStructure trivial_structure(int depth);

}  // namespace hpq
