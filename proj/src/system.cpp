#include "ddwalk/system.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <unordered_set>

namespace ddwalk {

namespace {
std::uint64_t pair_key(int i, int j) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(i)) << 32) |
           static_cast<std::uint32_t>(j);
}
}  // namespace

SparseDDSystem SparseDDSystem::from_triplets(
    int n, const std::vector<std::pair<int, double>>& diag_entries,
    const std::vector<std::pair<std::pair<int, int>, double>>& offdiag_entries,
    const std::vector<double>& b) {
    if (n <= 0) throw InvalidParameters("dimension must be positive");
    if (static_cast<int>(b.size()) != n)
        throw DimensionMismatch("rhs length " + std::to_string(b.size()) +
                                " != n " + std::to_string(n));

    SparseDDSystem s;
    s.n_ = n;
    s.diag_.assign(n, 0.0);
    s.b_ = b;

    std::vector<char> diag_seen(n, 0);
    for (const auto& [i, v] : diag_entries) {
        if (i < 0 || i >= n) throw IndexOutOfRange("diagonal index out of range");
        if (diag_seen[i]) throw DuplicateEntry("duplicate diagonal entry at " + std::to_string(i));
        diag_seen[i] = 1;
        s.diag_[i] = v;
    }

    std::vector<int> counts(n, 0);
    std::unordered_set<std::uint64_t> seen;
    seen.reserve(offdiag_entries.size() * 2);
    for (const auto& [ij, w] : offdiag_entries) {
        auto [i, j] = ij;
        if (i < 0 || i >= n || j < 0 || j >= n)
            throw IndexOutOfRange("off-diagonal index out of range");
        if (i == j)
            throw SelfLoop("off-diagonal triplet with i == j at " + std::to_string(i));
        if (!seen.insert(pair_key(i, j)).second)
            throw DuplicateEntry("duplicate off-diagonal entry (" + std::to_string(i) +
                                 ", " + std::to_string(j) + ")");
        if (w == 0.0) continue;  // structural zero carries no edge
        ++counts[i];
    }

    s.row_ptr_.assign(n + 1, 0);
    for (int i = 0; i < n; ++i) s.row_ptr_[i + 1] = s.row_ptr_[i] + counts[i];
    s.cols_.resize(s.row_ptr_[n]);
    s.weights_.resize(s.row_ptr_[n]);

    std::vector<int> cursor(s.row_ptr_.begin(), s.row_ptr_.end() - 1);
    for (const auto& [ij, w] : offdiag_entries) {
        if (w == 0.0) continue;
        auto [i, j] = ij;
        const int pos = cursor[i]++;
        s.cols_[pos] = j;
        s.weights_[pos] = w;
    }

    s.finalize();
    return s;
}

SparseDDSystem SparseDDSystem::fj_system(
    const std::vector<std::pair<std::pair<int, int>, double>>& edges, int n,
    const std::vector<double>& innate) {
    if (static_cast<int>(innate.size()) != n)
        throw DimensionMismatch("innate opinion length != n");
    for (double v : innate)
        if (!(v >= 0.0 && v <= 1.0))
            throw OpinionOutOfRange("innate opinion outside [0,1]");

    std::vector<std::pair<std::pair<int, int>, double>> offdiag;
    offdiag.reserve(edges.size() * 2);
    std::vector<double> wdeg(n, 0.0);
    for (const auto& [uv, w] : edges) {
        auto [u, v] = uv;
        if (u < 0 || u >= n || v < 0 || v >= n)
            throw IndexOutOfRange("edge endpoint out of range");
        if (u == v) throw SelfLoop("self-loop in FJ edge list");
        if (!(w > 0.0)) throw NegativeWeight("FJ edge weight must be positive");
        offdiag.push_back({{u, v}, -w});
        offdiag.push_back({{v, u}, -w});
        wdeg[u] += w;
        wdeg[v] += w;
    }
    std::vector<std::pair<int, double>> diag(n);
    for (int u = 0; u < n; ++u) diag[u] = {u, 1.0 + wdeg[u]};
    return from_triplets(n, diag, offdiag, innate);
}

void SparseDDSystem::finalize() {
    dout_.assign(n_, 0.0);
    cumw_.resize(cols_.size());
    for (int u = 0; u < n_; ++u) {
        double acc = 0.0;
        for (int p = row_ptr_[u]; p < row_ptr_[u + 1]; ++p) {
            acc += std::abs(weights_[p]);
            cumw_[p] = acc;
        }
        dout_[u] = acc;
    }
}

double SparseDDSystem::max_delta() const {
    double m = std::numeric_limits<double>::infinity();
    for (int u = 0; u < n_; ++u) m = std::min(m, std::abs(diag_[u]) - dout_[u]);
    return m;
}

double SparseDDSystem::s_max() const {
    double m = 0.0;
    for (double d : diag_) m = std::max(m, std::abs(d));
    return m;
}

bool SparseDDSystem::is_delta_dd(double delta) const {
    return max_delta() >= delta;
}

double SparseDDSystem::weighted_max_degree() const {
    double m = 0.0;
    for (double d : dout_) m = std::max(m, d);
    return m;
}

double SparseDDSystem::b_inf_norm() const {
    double m = 0.0;
    for (double v : b_) m = std::max(m, std::abs(v));
    return m;
}

Triplets SparseDDSystem::to_triplets() const {
    Triplets t;
    t.n = n_;
    t.b = b_;
    t.diag.reserve(n_);
    for (int u = 0; u < n_; ++u) t.diag.push_back({u, diag_[u]});
    t.offdiag.reserve(cols_.size());
    for (int u = 0; u < n_; ++u)
        for (int p = row_ptr_[u]; p < row_ptr_[u + 1]; ++p)
            t.offdiag.push_back({{u, cols_[p]}, weights_[p]});
    return t;
}

SparseDDSystem SparseDDSystem::with_rhs(std::vector<double> b) const {
    if (static_cast<int>(b.size()) != n_)
        throw DimensionMismatch("rhs length != n");
    SparseDDSystem s = *this;
    s.b_ = std::move(b);
    return s;
}

}  // namespace ddwalk
