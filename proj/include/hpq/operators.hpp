#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "hpq/haar.hpp"
#include "hpq/mixed_norm.hpp"

namespace hpq {

// Operator on the depth-N Haar span, stored as the raw pairing matrix
// entry(row R, col R') = <T h_{R'}, h_R>.  The 1/|R| normalization lives in
// apply(), which keeps the stored matrix symmetric exactly when T is
// self-adjoint.  Storage is sparse with per-row and per-column adjacency.
class OperatorMatrix {
  public:
    explicit OperatorMatrix(int depth = 0);

    int depth() const { return depth_; }
    std::uint64_t dim() const { return rectangle_count(depth_); }
    std::size_t entry_count() const { return n_entries_; }

    void add_entry(const DyadicRectangle& row, const DyadicRectangle& col, double v);
    void add_entry(OrderingIndex row, OrderingIndex col, double v);

    double entry(OrderingIndex row, OrderingIndex col) const;
    double entry(const DyadicRectangle& row, const DyadicRectangle& col) const;

    // adjacency lists sorted by index; empty vector when absent
    const std::vector<std::pair<OrderingIndex, double>>& column(OrderingIndex col) const;
    const std::vector<std::pair<OrderingIndex, double>>& row(OrderingIndex row) const;

    // deterministic traversal of all entries (row-major)
    void for_each_entry(
        const std::function<void(OrderingIndex, OrderingIndex, double)>& fn) const;

  private:
    int depth_;
    std::size_t n_entries_ = 0;
    std::map<OrderingIndex, std::vector<std::pair<OrderingIndex, double>>> cols_;
    std::map<OrderingIndex, std::vector<std::pair<OrderingIndex, double>>> rows_;
    static const std::vector<std::pair<OrderingIndex, double>> empty_;
};

// (Tf)_R = sum_{R'} entry(R,R') a_{R'} / |R|
HaarExpansion apply(const OperatorMatrix& t, const HaarExpansion& f);

OperatorMatrix adjoint(const OperatorMatrix& t);

struct Decomposition {
    double alpha = 0.0;       // <T h_R, h_R>/|R|
    HaarExpansion residual;   // T h_R - alpha h_R, orthogonal to h_R
};
Decomposition decompose(const OperatorMatrix& t, const DyadicRectangle& r);

struct DiagonalData {
    std::map<OrderingIndex, double> alpha;
    double delta = 0.0;  // min |alpha_R| over all depth-<=N rectangles
};
DiagonalData diagonal_delta(const OperatorMatrix& t);

struct NormEstimate {
    double value = 0.0;
    bool exact = false;     // true only on the p=q=2 power-iteration path
    std::uint64_t samples = 0;
};

// Sampled lower bound max ||Tf||/||f|| over seeded random test functions;
// at p=q=2 the exact value via power iteration on the measure-weighted matrix
// is returned instead (and the sampled estimate can never exceed it).
NormEstimate estimate_norm(const OperatorMatrix& t, double p, double q,
                           int budget, std::uint64_t seed);

// Largest singular value of D^{-1/2} M D^{-1/2} (D = diag measures): the exact
// operator norm on the weighted l2 coefficient space.
double exact_l2_norm(const OperatorMatrix& t);

enum class TestOperatorKind { PureDiagonal, DiagonalDecaying, DiagonalRankOne };
TestOperatorKind test_operator_kind_from_string(const std::string& s);
std::string to_string(TestOperatorKind k);

struct TestOperatorParams {
    double delta = 0.8;    // true lower bound on |alpha_R|
    double spread = 0.1;   // alpha_R = delta + spread*u_R, u_R in [0,1)
    double epsilon = 0.05; // off-diagonal strength (DiagonalDecaying)
    int coupling_cap = 6;  // off-diagonal entries only where level sum <= cap
    double mu = 1.0;       // rank-one coupling strength (DiagonalRankOne)
};

// Deterministic hypothesis instances.  The nominal delta is a true lower
// bound on |alpha_R| by construction: off-diagonal mass is only ever added
// off the diagonal.  DiagonalDecaying entries obey
// |entry(R,R')| <= epsilon * 2^-(level gap).
OperatorMatrix gen_test_operator(TestOperatorKind kind, const TestOperatorParams& params,
                                 std::uint64_t seed, int depth);

}  // namespace hpq
