#pragma once

#include <cstdint>
#include <optional>

#include "ddwalk/errors.hpp"

namespace ddwalk {

struct LedgerSnapshot {
    std::uint64_t vertex = 0;
    std::uint64_t neighbor = 0;
    std::uint64_t walk = 0;
    std::uint64_t total() const { return vertex + neighbor + walk; }
};

// Per-type query counters. Not thread-safe by design: concurrent workers each
// charge their own sub-ledger, merged after the fact, so the hot path stays
// free of atomic traffic. Budget enforcement is single-worker only.
class QueryLedger {
  public:
    QueryLedger() = default;
    explicit QueryLedger(std::optional<std::uint64_t> budget) : budget_(budget) {}

    void charge_vertex() { charge(vertex_); }
    void charge_neighbor() { charge(neighbor_); }
    void charge_walk() { charge(walk_); }

    std::uint64_t vertex_queries() const { return vertex_; }
    std::uint64_t neighbor_queries() const { return neighbor_; }
    std::uint64_t walk_queries() const { return walk_; }
    std::uint64_t total() const { return vertex_ + neighbor_ + walk_; }

    std::optional<std::uint64_t> budget() const { return budget_; }

    void merge(const QueryLedger& other) {
        vertex_ += other.vertex_;
        neighbor_ += other.neighbor_;
        walk_ += other.walk_;
    }

    LedgerSnapshot snapshot() const { return {vertex_, neighbor_, walk_}; }

  private:
    void charge(std::uint64_t& counter) {
        if (budget_ && total() >= *budget_)
            throw BudgetExhausted("query budget exhausted");
        ++counter;
    }

    std::uint64_t vertex_ = 0;
    std::uint64_t neighbor_ = 0;
    std::uint64_t walk_ = 0;
    std::optional<std::uint64_t> budget_;
};

}  // namespace ddwalk
