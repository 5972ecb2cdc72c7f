#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hpq/blocks.hpp"
#include "hpq/operators.hpp"

namespace hpq {

struct ConstructionParams {
    double delta = 0.8;
    double eta = 0.0;      // 0 picks the default delta/9
    int depth = 6;
    int n_steps = 9;
    int sign_budget = 4096;
    std::uint64_t seed = 0;

    void validate() const;
    double eta_or_default() const { return eta > 0.0 ? eta : delta / 9.0; }
};

struct SignSample {
    std::vector<int> signs;  // +-1 per member, in member order
    double x_value = 0.0;    // X(eps) = <f_m, R_m>
};

struct SignSearchResult {
    bool ok = false;
    SignSample sample;       // best found even on failure
    std::uint64_t tried = 0;
    bool exhaustive = false;
};

struct StepDiagnostics {
    std::uint64_t index = 0;
    DyadicRectangle rect;
    int case_id = 0;         // 0 init, 1 x-split, 2 y-split, 3 interior
    int m_chosen = 0;
    int m_min = 0;
    std::size_t family_size = 0;
    double l2_sq = 0.0;
    double offdiag_value = 0.0;
    double offdiag_threshold = 0.0;
    double x_value = 0.0;
    double x_threshold = 0.0;
    bool exhaustive = false;
    std::uint64_t samples_tried = 0;
    double diag_ratio = 0.0;  // <T b_i, b_i> / ||b_i||_2^2
    bool diag_ok = false;
    bool majority_restricted = false;
    bool relaxed = false;
    std::string relax_reason;
};

struct ConstructionResult {
    BlockFamily family;
    std::vector<StepDiagnostics> steps;

    bool clean() const {
        for (const auto& s : steps)
            if (s.relaxed || !s.diag_ok) return false;
        return true;
    }
    bool any_restricted() const {
        for (const auto& s : steps)
            if (s.majority_restricted) return true;
        return false;
    }
};

// Admissible frequency-m cover for the rectangle of index i, given the blocks
// built so far.  Case 1 (J trivial): Gamlen-Gaudet step in x over the
// left/right halves of the predecessor's x-sides.  Case 2.a (I trivial):
// mirror step in y.  Case 2.b: x-sides of B_{I x [0,1]} kept intact, y-sides
// a frequency-m cover inside B_{pred(I) x J}.  Purely geometric; empty when
// the frequency is too coarse.  Throws when m exceeds the family depth or the
// required predecessor blocks are missing.
std::vector<DyadicRectangle> candidate_frequencies(const BlockFamily& prefix,
                                                   OrderingIndex i, int m);

// Sign-independent majorant
//   sum_{j} sum_{K x L in F} |<T b_j, h_{K x L}>| + |<T h_{K x L}, b_j>|
// over the already-built blocks.
double offdiag_bound(const OperatorMatrix& t, const std::vector<DyadicRectangle>& face,
                     const BlockFamily& prior);

// Find signs with |X(eps)| <= eta ||f||_2^2 where X(eps) = <f, R_m^(eps)>.
// Exhaustive (and exactly minimizing) for <=16 members, otherwise seeded
// random sampling up to the budget; failure carries the best sample found.
SignSearchResult sign_search(const OperatorMatrix& t,
                             const std::vector<DyadicRectangle>& face, double eta,
                             int budget, std::uint64_t seed);

struct SignEnsembleStats {
    double mean = 0.0;
    double second_moment = 0.0;
    std::uint64_t count = 0;
    std::vector<double> values;  // X(eps) over the full ensemble

    // fraction of patterns with |X| >= threshold
    double violation_fraction(double threshold) const {
        if (values.empty()) return 0.0;
        std::size_t n = 0;
        for (double x : values)
            if (std::abs(x) >= threshold) ++n;
        return static_cast<double>(n) / static_cast<double>(values.size());
    }
    // Chebyshev bound E X^2 / threshold^2 from the same ensemble
    double chebyshev_bound(double threshold) const {
        return second_moment / (threshold * threshold);
    }
};

// Full-ensemble statistics of X(eps); requires <= 16 members.
SignEnsembleStats sign_ensemble_stats(const OperatorMatrix& t,
                                      const std::vector<DyadicRectangle>& face);

// Incremental construction driver.  init_state() seeds B_0 = {[0,1)^2}; each
// step(i) picks the smallest admissible frequency, restricts to the
// majority diagonal sign when signs are mixed, runs the sign search and
// records diagnostics; the relaxation policy accepts the best attempt when
// nothing passes at the available depth (never silently).
class Builder {
  public:
    Builder(const OperatorMatrix& t, const ConstructionParams& params);

    void init_state();
    StepDiagnostics step(OrderingIndex i);

    const BlockFamily& family() const { return family_; }
    const std::vector<StepDiagnostics>& steps() const { return steps_; }
    ConstructionResult take_result() &&;

  private:
    struct Attempt;
    Attempt try_frequency(OrderingIndex i, int m, double eta);
    void commit_block(const DyadicRectangle& rect, const std::vector<DyadicRectangle>& face,
                      const std::vector<int>& signs);

    const OperatorMatrix& t_;
    ConstructionParams params_;
    BlockFamily family_;
    std::vector<StepDiagnostics> steps_;
    // per built block: row -> <T b_j, h_row> and col -> <T h_col, b_j>
    std::vector<std::map<OrderingIndex, double>> img_, coimg_;
};

ConstructionResult build(const OperatorMatrix& t, const ConstructionParams& params);

// max over i of sum_{j != i} O(j) |<T b_j, b_i>| / ||b_i||_2^2 with O(j) the
// ordering index of block j.
double almost_diag_check(const OperatorMatrix& t, const BlockFamily& fam);

// pairings <T b_j, b_i> for all block pairs (row i, col j)
std::vector<std::vector<double>> block_pairings(const OperatorMatrix& t,
                                                const BlockFamily& fam);

}  // namespace hpq
