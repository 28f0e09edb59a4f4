#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

#include "ddwalk/ledger.hpp"
#include "ddwalk/rng.hpp"
#include "ddwalk/system.hpp"

namespace ddwalk {

struct VertexAnswer {
    int delta_out;   // unweighted out-degree
    double d_out;    // weighted out-degree
    double s_uu;     // diagonal entry (shifted if the oracle carries a shift)
    double b_u;
};

struct WalkAnswer {
    int v;
    double s_uv;
};

// Query interface over a fixed (S, b) pair. Every query charges one unit to
// the ledger. A positive shift sigma turns this into the oracle of the
// perturbed system S + sigma*I': only the diagonal reported by vertex queries
// changes, d_out and all neighbor/walk answers are those of the base system.
class Oracle {
  public:
    Oracle(const SparseDDSystem& sys, QueryLedger& ledger)
        : sys_(&sys), ledger_(&ledger) {}

    VertexAnswer vertex_query(int u) {
        check_vertex(u);
        ledger_->charge_vertex();
        return {sys_->degree(u), sys_->dout(u), shifted_diag(u), sys_->b(u)};
    }

    // i is 1-indexed, matching the oracle contract.
    int neighbor_query(int u, int i) {
        check_vertex(u);
        if (i < 1 || i > sys_->degree(u))
            throw IndexOutOfRange("neighbor index " + std::to_string(i) +
                                  " out of range for vertex " + std::to_string(u));
        ledger_->charge_neighbor();
        return sys_->row_cols(u)[i - 1];
    }

    // Samples v with probability |S_uv| / d_out(u); nullopt is the bottom
    // symbol for isolated vertices (still costs one unit).
    std::optional<WalkAnswer> random_walk_query(int u, Rng& rng) {
        check_vertex(u);
        ledger_->charge_walk();
        const int deg = sys_->degree(u);
        if (deg == 0) return std::nullopt;
        const auto cumw = sys_->row_cumw(u);
        const double r = rng.next_double() * sys_->dout(u);
        const auto it = std::upper_bound(cumw.begin(), cumw.end(), r);
        int idx = static_cast<int>(it - cumw.begin());
        if (idx >= deg) idx = deg - 1;  // guard against r == dout
        return WalkAnswer{sys_->row_cols(u)[idx], sys_->row_weights(u)[idx]};
    }

    Oracle shifted(double sigma) const {
        if (!(sigma > 0.0)) throw NonPositiveSigma("shift sigma must be positive");
        Oracle o = *this;
        o.sigma_ += sigma;
        return o;
    }

    // Same system and shift, queries charged to a different ledger.
    Oracle with_ledger(QueryLedger& ledger) const {
        Oracle o = *this;
        o.ledger_ = &ledger;
        return o;
    }

    const SparseDDSystem& system() const { return *sys_; }
    QueryLedger& ledger() const { return *ledger_; }
    double shift() const { return sigma_; }
    int n() const { return sys_->n(); }

  private:
    void check_vertex(int u) const {
        if (u < 0 || u >= sys_->n())
            throw IndexOutOfRange("vertex " + std::to_string(u) + " out of range");
    }

    double shifted_diag(int u) const {
        const double s = sys_->diag(u);
        if (sigma_ == 0.0) return s;
        if (s > 0.0) return s + sigma_;
        if (s < 0.0) return s - sigma_;
        return sigma_;
    }

    const SparseDDSystem* sys_;
    QueryLedger* ledger_;
    double sigma_ = 0.0;
};

inline Oracle shifted_oracle(const Oracle& o, double sigma) { return o.shifted(sigma); }

}  // namespace ddwalk
