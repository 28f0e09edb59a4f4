#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "ddwalk/errors.hpp"

namespace ddwalk {

struct Triplets {
    int n = 0;
    std::vector<std::pair<int, double>> diag;             // (i, S_ii)
    std::vector<std::pair<std::pair<int, int>, double>> offdiag;  // ((i,j), S_ij)
    std::vector<double> b;
};

// Sparse row-wise view of a pair (S, b). Off-diagonal entries are stored in
// CSR layout; the per-row order is fixed at construction and defines the
// answer of the neighbor query. Immutable after construction.
class SparseDDSystem {
  public:
    static SparseDDSystem from_triplets(
        int n, const std::vector<std::pair<int, double>>& diag_entries,
        const std::vector<std::pair<std::pair<int, int>, double>>& offdiag_entries,
        const std::vector<double>& b);

    // S = I + L for the Laplacian L of an undirected weighted graph, b = innate
    // opinions. Always 1-DD.
    static SparseDDSystem fj_system(
        const std::vector<std::pair<std::pair<int, int>, double>>& edges, int n,
        const std::vector<double>& innate);

    int n() const { return n_; }
    double diag(int u) const { return diag_[u]; }
    double b(int u) const { return b_[u]; }
    double dout(int u) const { return dout_[u]; }
    int degree(int u) const { return row_ptr_[u + 1] - row_ptr_[u]; }

    std::span<const int> row_cols(int u) const {
        return {cols_.data() + row_ptr_[u], static_cast<std::size_t>(degree(u))};
    }
    std::span<const double> row_weights(int u) const {
        return {weights_.data() + row_ptr_[u], static_cast<std::size_t>(degree(u))};
    }
    // Prefix sums of |S_uv| over the row, last element equals dout(u).
    std::span<const double> row_cumw(int u) const {
        return {cumw_.data() + row_ptr_[u], static_cast<std::size_t>(degree(u))};
    }

    const std::vector<double>& diag_vec() const { return diag_; }
    const std::vector<double>& b_vec() const { return b_; }

    double max_delta() const;
    double s_max() const;
    bool is_delta_dd(double delta) const;
    double weighted_max_degree() const;
    double b_inf_norm() const;

    Triplets to_triplets() const;

    // Same S, different right-hand side.
    SparseDDSystem with_rhs(std::vector<double> b) const;

    // Empty (n = 0) system; a placeholder until a real one is assigned.
    SparseDDSystem() = default;

  private:
    void finalize();

    int n_ = 0;
    std::vector<double> diag_;
    std::vector<double> b_;
    std::vector<double> dout_;
    std::vector<int> row_ptr_;
    std::vector<int> cols_;
    std::vector<double> weights_;
    std::vector<double> cumw_;
};

}  // namespace ddwalk
