#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "ddwalk/hardgen.hpp"
#include "ddwalk/io.hpp"
#include "ddwalk/oracle.hpp"
#include "ddwalk/reference.hpp"
#include "ddwalk/solver.hpp"

namespace {

using namespace ddwalk;

constexpr int kExitOk = 0;
constexpr int kExitVerifyFail = 1;
constexpr int kExitParse = 2;
constexpr int kExitModel = 3;

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
}

std::string fmt_csv(double x) {
    std::ostringstream os;
    os.precision(12);
    os << x;
    return os.str();
}

void print_report(const EstimateReport& r) {
    std::cout << "estimate " << fmt(r.estimate) << "\n"
              << "samples " << r.samples << " of " << r.requested_samples << "\n"
              << "queries " << r.queries.total() << " (vertex " << r.queries.vertex
              << ", neighbor " << r.queries.neighbor << ", walk " << r.queries.walk
              << ")\n";
    if (r.truncation_threshold)
        std::cout << "truncated_walks " << r.truncated_count << "\n";
    if (r.partial) std::cout << "partial (budget exhausted)\n";
}

// --- gen ------------------------------------------------------------------

// Simple d-regular graph via the pairing model with rejection.
io::EdgeList gen_regular(int n, int d, Rng& rng) {
    if (n <= 0 || d <= 0 || d >= n || (static_cast<long long>(n) * d) % 2 != 0)
        throw InvalidParams("regular graph needs 0 < d < n and n*d even");
    for (int attempt = 0; attempt < 2000; ++attempt) {
        std::vector<int> stubs;
        stubs.reserve(static_cast<std::size_t>(n) * d);
        for (int v = 0; v < n; ++v)
            for (int j = 0; j < d; ++j) stubs.push_back(v);
        rng.shuffle(stubs.data(), stubs.size());
        std::vector<std::pair<std::pair<int, int>, double>> edges;
        std::vector<std::uint64_t> seen;
        bool ok = true;
        for (std::size_t i = 0; i + 1 < stubs.size(); i += 2) {
            int u = stubs[i], v = stubs[i + 1];
            if (u == v) { ok = false; break; }
            if (u > v) std::swap(u, v);
            const std::uint64_t key =
                (static_cast<std::uint64_t>(u) << 32) | static_cast<std::uint32_t>(v);
            if (std::find(seen.begin(), seen.end(), key) != seen.end()) {
                ok = false;
                break;
            }
            seen.push_back(key);
            edges.push_back({{u, v}, 1.0});
        }
        if (ok) return {n, std::move(edges)};
    }
    throw InvalidParams("could not realize a simple regular graph");
}

io::EdgeList gen_er(int n, double p, Rng& rng) {
    if (n <= 0 || !(p > 0.0) || p > 1.0)
        throw InvalidParams("er graph needs n > 0 and p in (0, 1]");
    io::EdgeList el;
    el.n = n;
    for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v)
            if (rng.next_coin(p)) el.edges.push_back({{u, v}, 1.0});
    return el;
}

int cmd_gen(const std::string& kind, int n, int d, double p, std::uint64_t seed,
            const std::string& out) {
    RngSeq seq{seed, 0x67656eULL};  // command-scoped nonce
    Rng rng = seq.stream(0);
    if (kind == "regular") {
        io::write_edge_list(out, gen_regular(n, d, rng));
    } else if (kind == "er") {
        io::write_edge_list(out, gen_er(n, p, rng));
    } else if (kind == "fj-random") {
        io::EdgeList el = p > 0.0 ? gen_er(n, p, rng) : io::EdgeList{n, {}};
        io::write_edge_list(out, el);
        std::vector<double> innate(n);
        for (auto& x : innate) x = rng.next_double();
        io::write_opinions(out + ".opinions", innate);
        std::cout << "wrote " << out << " and " << out << ".opinions\n";
        return kExitOk;
    } else {
        throw InvalidParams("unknown generator kind: " + kind);
    }
    std::cout << "wrote " << out << "\n";
    return kExitOk;
}

// --- solve ----------------------------------------------------------------

int cmd_solve(const std::string& path, int u, double eps,
              std::optional<double> delta, std::optional<double> kappa,
              Mode mode, std::uint64_t seed, int threads) {
    const SparseDDSystem sys = io::read_triplet_file(path);
    if (u < 0 || u >= sys.n()) throw InvalidParams("vertex out of range");
    const double bmax = sys.b_inf_norm();

    QueryLedger ledger;
    Oracle o(sys, ledger);
    RngSeq seq{seed, 0x736f6c76ULL};

    if (kappa) {
        const double smax = sys.s_max();
        const EstimateReport r = estimate_entry_nonstrict(o, u, *kappa, eps,
                                                          bmax, smax, seq, threads);
        print_report(r);
        return kExitOk;
    }

    double d = delta.value_or(sys.max_delta());
    if (!delta)
        std::cout << "delta " << fmt(d) << " (derived from full matrix scan, "
                  << "outside the query model)\n";
    if (!(d > 0.0) || !sys.is_delta_dd(d)) {
        std::cerr << "system is not strictly diagonally dominant at delta "
                  << fmt(d) << "; pass --kappa to use the shifted solve\n";
        return kExitModel;
    }
    const EstimateReport r =
        estimate_entry(o, u, d, eps, bmax, mode, seq, threads);
    print_report(r);
    return kExitOk;
}

// --- fj -------------------------------------------------------------------

int cmd_fj(const std::string& edges_path, const std::string& opinions_path,
           int u, double eps, std::uint64_t seed, int threads) {
    const io::EdgeList el = io::read_edge_list(edges_path);
    const std::vector<double> innate = io::read_opinions(opinions_path);
    const int n = std::max<int>(el.n, static_cast<int>(innate.size()));
    if (static_cast<int>(innate.size()) != n)
        throw DimensionMismatch("opinions file has " +
                                std::to_string(innate.size()) + " values for " +
                                std::to_string(n) + " vertices");
    const SparseDDSystem sys = SparseDDSystem::fj_system(el.edges, n, innate);
    if (u < 0 || u >= n) throw InvalidParams("vertex out of range");

    std::cout << "W " << fmt(sys.weighted_max_degree()) << "\n";
    QueryLedger ledger;
    Oracle o(sys, ledger);
    RngSeq seq{seed, 0x666aULL};
    print_report(estimate_fj_opinion(o, u, eps, seq, threads));
    return kExitOk;
}

// --- bench ----------------------------------------------------------------

int cmd_bench(const std::string& edges_path, const std::string& opinions_path,
              int vertices, const std::vector<std::uint64_t>& budgets,
              std::uint64_t seed, const std::string& csv_out, int threads,
              bool timing) {
    if (vertices <= 0) throw InvalidParams("need a positive vertex sample count");
    if (budgets.empty()) throw InvalidParams("need at least one budget");
    const io::EdgeList el = io::read_edge_list(edges_path);
    const std::vector<double> innate = io::read_opinions(opinions_path);
    const int n = std::max<int>(el.n, static_cast<int>(innate.size()));
    if (static_cast<int>(innate.size()) != n)
        throw DimensionMismatch("opinions/edges size mismatch");
    if (n > 5000)
        throw TooLargeForGroundTruth("exact ground truth is capped at n = 5000");
    const SparseDDSystem sys = SparseDDSystem::fj_system(el.edges, n, innate);
    const std::vector<double> truth =
        reference::fj_fixed_point(el.edges, n, innate, 1e-10, 2000000);

    RngSeq seq{seed, 0x62656e6368ULL};
    Rng pick = seq.stream(~0ULL);  // vertex sampling stream, disjoint from walks
    std::vector<int> sample(vertices);
    for (auto& v : sample) v = static_cast<int>(pick.next_index(n));

    // fixed estimation parameters: t = 10000 averaged samples per estimate,
    // the budget does the truncation
    const std::uint64_t t = 10000;

    std::ostringstream csv;
    csv << "budget,abs_err_mean,abs_err_p90,trials,mean_queries,wall_ms\n";
    for (std::size_t bi = 0; bi < budgets.size(); ++bi) {
        const std::uint64_t budget = budgets[bi];
        const auto start = std::chrono::steady_clock::now();
        std::vector<double> errs(vertices);
        std::vector<std::uint64_t> queries(vertices);
        std::uint64_t cut = 0;

        auto run_trial = [&](int i) {
            QueryLedger ledger{budget};
            Oracle o(sys, ledger);
            const RngSeq sub = seq.derived(bi * static_cast<std::uint64_t>(vertices) + i);
            const EstimateReport r =
                run_estimate(o, sample[i], t, Mode::Expected, 0.0, sub, 1,
                             1.0);  // delta = 1, bmax = 1 -> |sample| <= 1
            errs[i] = std::abs(r.estimate - truth[sample[i]]);
            queries[i] = r.queries.total();
            if (r.partial) ++cut;
        };
        if (threads <= 1) {
            for (int i = 0; i < vertices; ++i) run_trial(i);
        } else {
            std::vector<std::thread> pool;
            std::atomic<int> next{0};
            std::atomic<std::uint64_t> cut_acc{0};
            for (int w = 0; w < threads; ++w)
                pool.emplace_back([&] {
                    for (int i = next.fetch_add(1); i < vertices;
                         i = next.fetch_add(1)) {
                        QueryLedger ledger{budget};
                        Oracle o(sys, ledger);
                        const RngSeq sub = seq.derived(
                            bi * static_cast<std::uint64_t>(vertices) + i);
                        const EstimateReport r = run_estimate(
                            o, sample[i], t, Mode::Expected, 0.0, sub, 1, 1.0);
                        errs[i] = std::abs(r.estimate - truth[sample[i]]);
                        queries[i] = r.queries.total();
                        if (r.partial) cut_acc.fetch_add(1);
                    }
                });
            for (auto& th : pool) th.join();
            cut = cut_acc.load();
        }

        double err_sum = 0.0;
        double q_sum = 0.0;
        for (int i = 0; i < vertices; ++i) {
            err_sum += errs[i];
            q_sum += static_cast<double>(queries[i]);
        }
        std::vector<double> sorted = errs;
        std::sort(sorted.begin(), sorted.end());
        const std::size_t p90 =
            std::min<std::size_t>(sorted.size() - 1,
                                  static_cast<std::size_t>(
                                      std::ceil(0.9 * sorted.size())) - 1);
        const auto stop = std::chrono::steady_clock::now();
        const double wall =
            timing ? std::chrono::duration<double, std::milli>(stop - start).count()
                   : 0.0;
        csv << budget << ',' << fmt_csv(err_sum / vertices) << ','
            << fmt_csv(sorted[p90]) << ',' << vertices << ','
            << fmt_csv(q_sum / vertices) << ',' << fmt_csv(wall) << '\n';
        std::cout << "budget " << budget << ": " << cut << "/" << vertices
                  << " estimates cut short by the budget\n";
    }

    if (csv_out.empty()) {
        std::cout << csv.str();
    } else {
        std::ofstream f(csv_out);
        if (!f) throw IoError("cannot write " + csv_out);
        f << csv.str();
        std::cout << "wrote " << csv_out << "\n";
    }
    return kExitOk;
}

// --- lb -------------------------------------------------------------------

int cmd_lb(int n, int k, int d, const std::vector<std::uint64_t>& budgets,
           int trials, std::uint64_t seed, const std::string& csv_out) {
    if (budgets.empty()) throw InvalidParams("need at least one budget");
    std::ostringstream csv;
    csv << "budget,acc_family0,acc_family1,mean_queries\n";
    for (std::size_t bi = 0; bi < budgets.size(); ++bi) {
        RngSeq seq{seed, 0x6c62ULL + bi};
        const hardgen::DistinguishResult r =
            hardgen::distinguish_experiment(n, k, d, budgets[bi], trials, seq);
        csv << budgets[bi] << ',' << fmt_csv(r.success_rate_0) << ','
            << fmt_csv(r.success_rate_1) << ',' << fmt_csv(r.mean_queries)
            << '\n';
    }
    if (csv_out.empty()) {
        std::cout << csv.str();
    } else {
        std::ofstream f(csv_out);
        if (!f) throw IoError("cannot write " + csv_out);
        f << csv.str();
        std::cout << "wrote " << csv_out << "\n";
    }
    return kExitOk;
}

// --- verify ---------------------------------------------------------------

struct Suite {
    std::string name;
    bool (*run)(std::uint64_t seed, std::string& detail);
};

bool suite_oracle_counts(std::uint64_t seed, std::string& detail) {
    RngSeq seq{seed, 1};
    Rng rng = seq.stream(0);
    const SparseDDSystem sys = SparseDDSystem::from_triplets(
        3, {{0, 3.0}, {1, 3.0}, {2, 3.0}},
        {{{0, 1}, -1.0}, {{1, 0}, -1.0}, {{1, 2}, -1.0}, {{2, 1}, -1.0}},
        {1.0, 0.0, 0.0});
    QueryLedger ledger;
    Oracle o(sys, ledger);
    for (int i = 0; i < 10; ++i) o.vertex_query(i % 3);
    for (int i = 0; i < 5; ++i) o.neighbor_query(1, 1 + (i % 2));
    for (int i = 0; i < 7; ++i) o.random_walk_query(1, rng);
    const auto s = ledger.snapshot();
    if (s.vertex != 10 || s.neighbor != 5 || s.walk != 7 || s.total() != 22) {
        detail = "ledger miscount";
        return false;
    }
    return true;
}

bool suite_walk_distribution(std::uint64_t seed, std::string& detail) {
    // vertex with out-weights 1 and 3: the heavier neighbor appears with
    // frequency 3/4
    const SparseDDSystem sys = SparseDDSystem::from_triplets(
        3, {{0, 5.0}, {1, 2.0}, {2, 4.0}},
        {{{0, 1}, -1.0}, {{0, 2}, 3.0}}, {0.0, 0.0, 0.0});
    QueryLedger ledger;
    Oracle o(sys, ledger);
    Rng rng = RngSeq{seed, 2}.stream(0);
    const int trials = 200000;
    int heavy = 0;
    for (int i = 0; i < trials; ++i)
        if (o.random_walk_query(0, rng)->v == 2) ++heavy;
    const double freq = static_cast<double>(heavy) / trials;
    if (std::abs(freq - 0.75) > 0.006) {
        detail = "walk frequency " + fmt(freq) + " off 0.75";
        return false;
    }
    return true;
}

bool suite_unbiased_walk(std::uint64_t seed, std::string& detail) {
    // tridiagonal system with known solution (8/21, 3/21, 1/21)
    const SparseDDSystem sys = SparseDDSystem::from_triplets(
        3, {{0, 3.0}, {1, 3.0}, {2, 3.0}},
        {{{0, 1}, -1.0}, {{1, 0}, -1.0}, {{1, 2}, -1.0}, {{2, 1}, -1.0}},
        {1.0, 0.0, 0.0});
    QueryLedger ledger;
    Oracle o(sys, ledger);
    const EstimateReport r = estimate_entry(o, 0, 1.0, 0.02, 1.0,
                                            Mode::Expected, RngSeq{seed, 3});
    if (std::abs(r.estimate - 8.0 / 21.0) > 0.02) {
        detail = "estimate " + fmt(r.estimate) + " off 8/21";
        return false;
    }
    return true;
}

bool suite_shift_equivalence(std::uint64_t seed, std::string& detail) {
    // the shifted oracle must agree bitwise with an oracle over the
    // explicitly shifted matrix
    Rng rng = RngSeq{seed, 4}.stream(0);
    const SparseDDSystem base = SparseDDSystem::from_triplets(
        2, {{0, 2.0}, {1, -2.0}}, {{{0, 1}, 1.0}, {{1, 0}, -1.0}}, {1.0, 2.0});
    const double sigma = 0.375;
    auto t = base.to_triplets();
    for (auto& [i, d] : t.diag) d += d > 0 ? sigma : (d < 0 ? -sigma : sigma);
    const SparseDDSystem shifted_sys =
        SparseDDSystem::from_triplets(t.n, t.diag, t.offdiag, t.b);
    QueryLedger l1, l2;
    Oracle o1 = Oracle(base, l1).shifted(sigma);
    Oracle o2(shifted_sys, l2);
    for (int u = 0; u < 2; ++u) {
        const auto a1 = o1.vertex_query(u);
        const auto a2 = o2.vertex_query(u);
        if (a1.s_uu != a2.s_uu || a1.d_out != a2.d_out || a1.b_u != a2.b_u ||
            a1.delta_out != a2.delta_out) {
            detail = "vertex answers diverge at " + std::to_string(u);
            return false;
        }
        Rng r1 = rng, r2 = rng;
        const auto w1 = o1.random_walk_query(u, r1);
        const auto w2 = o2.random_walk_query(u, r2);
        if (w1->v != w2->v || w1->s_uv != w2->s_uv) {
            detail = "walk answers diverge at " + std::to_string(u);
            return false;
        }
    }
    return true;
}

bool suite_budget_boundary(std::uint64_t seed, std::string& detail) {
    (void)seed;
    const SparseDDSystem sys = SparseDDSystem::from_triplets(
        1, {{0, 1.0}}, {}, {1.0});
    QueryLedger ledger{3};
    Oracle o(sys, ledger);
    o.vertex_query(0);
    o.vertex_query(0);
    o.vertex_query(0);
    try {
        o.vertex_query(0);
    } catch (const BudgetExhausted&) {
        return ledger.snapshot().total() == 3;
    }
    detail = "budget not enforced at the boundary";
    return false;
}

int cmd_verify(std::uint64_t seed) {
    const Suite suites[] = {
        {"oracle-query-accounting", suite_oracle_counts},
        {"walk-step-distribution", suite_walk_distribution},
        {"unbiased-single-entry", suite_unbiased_walk},
        {"shifted-oracle-equivalence", suite_shift_equivalence},
        {"budget-boundary", suite_budget_boundary},
    };
    bool all = true;
    for (const auto& s : suites) {
        std::string detail;
        const bool ok = s.run(seed, detail);
        std::cout << (ok ? "pass" : "FAIL") << "  " << s.name;
        if (!ok && !detail.empty()) std::cout << "  (" << detail << ")";
        std::cout << "\n";
        all = all && ok;
    }
    return all ? kExitOk : kExitVerifyFail;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"single-entry estimation for diagonally dominant systems"};
    app.require_subcommand(1);

    std::uint64_t seed = 0;
    double eps = 0.05;
    std::optional<double> delta;
    std::optional<double> kappa;
    std::string mode_str = "expected";
    std::vector<std::uint64_t> budgets;
    std::string csv_path;
    int threads = 1;
    bool timing = false;

    auto add_common = [&](CLI::App* c, bool with_solver_flags) {
        c->add_option("--seed", seed, "rng seed")->capture_default_str();
        if (with_solver_flags) {
            c->add_option("--eps", eps, "target error")->capture_default_str();
            c->add_option("--threads", threads, "worker count")
                ->capture_default_str();
        }
    };

    // gen
    std::string gen_kind, gen_out = "graph.txt";
    int gen_n = 100, gen_d = 4;
    double gen_p = 0.1;
    auto* gen = app.add_subcommand("gen", "generate a synthetic graph");
    gen->add_option("kind", gen_kind, "regular | er | fj-random")->required();
    gen->add_option("--n", gen_n, "vertex count")->capture_default_str();
    gen->add_option("--d", gen_d, "degree (regular)")->capture_default_str();
    gen->add_option("--p", gen_p, "edge probability (er, fj-random)")
        ->capture_default_str();
    gen->add_option("--out", gen_out, "output path")->capture_default_str();
    add_common(gen, false);

    // solve
    std::string solve_path;
    int solve_u = 0;
    auto* solve = app.add_subcommand("solve", "estimate one entry of z in Sz=b");
    solve->add_option("matrix", solve_path, "triplet matrix file")->required();
    solve->add_option("--u", solve_u, "target coordinate")->capture_default_str();
    solve->add_option("--delta", delta, "strict dominance margin");
    solve->add_option("--kappa", kappa,
                      "condition number bound; enables the shifted solve");
    solve->add_option("--mode", mode_str, "expected | worstcase")
        ->capture_default_str();
    add_common(solve, true);

    // fj
    std::string fj_edges, fj_opinions;
    int fj_u = 0;
    auto* fj = app.add_subcommand("fj", "estimate one equilibrium opinion");
    fj->add_option("edges", fj_edges, "edge list file")->required();
    fj->add_option("opinions", fj_opinions, "innate opinions file")->required();
    fj->add_option("--u", fj_u, "target vertex")->capture_default_str();
    add_common(fj, true);

    // bench
    std::string bench_edges, bench_opinions;
    int bench_vertices = 100;
    auto* bench = app.add_subcommand("bench", "error-vs-budget sweep");
    bench->add_option("edges", bench_edges)->required();
    bench->add_option("opinions", bench_opinions)->required();
    bench->add_option("--vertices", bench_vertices, "sampled vertices")
        ->capture_default_str();
    bench->add_option("--budget", budgets, "query budgets")->required();
    bench->add_option("--csv", csv_path, "CSV output path (stdout if empty)");
    bench->add_flag("--timing", timing,
                    "fill wall_ms (off by default so output is reproducible)");
    add_common(bench, true);

    // lb
    int lb_n = 900, lb_k = 30, lb_d = 8, lb_trials = 60;
    auto* lb = app.add_subcommand("lb", "two-family distinguishing experiment");
    lb->add_option("--n", lb_n)->capture_default_str();
    lb->add_option("--k", lb_k)->capture_default_str();
    lb->add_option("--d", lb_d)->capture_default_str();
    lb->add_option("--trials", lb_trials)->capture_default_str();
    lb->add_option("--budget", budgets, "query budgets")->required();
    lb->add_option("--csv", csv_path, "CSV output path (stdout if empty)");
    add_common(lb, false);

    // verify
    auto* verify = app.add_subcommand("verify", "run the self-check suites");
    add_common(verify, false);

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed())
            return cmd_gen(gen_kind, gen_n, gen_d, gen_p, seed, gen_out);
        if (solve->parsed()) {
            Mode mode;
            if (mode_str == "expected") mode = Mode::Expected;
            else if (mode_str == "worstcase") mode = Mode::WorstCase;
            else throw InvalidParams("mode must be expected or worstcase");
            return cmd_solve(solve_path, solve_u, eps, delta, kappa, mode, seed,
                             threads);
        }
        if (fj->parsed())
            return cmd_fj(fj_edges, fj_opinions, fj_u, eps, seed, threads);
        if (bench->parsed())
            return cmd_bench(bench_edges, bench_opinions, bench_vertices,
                             budgets, seed, csv_path, threads, timing);
        if (lb->parsed())
            return cmd_lb(lb_n, lb_k, lb_d, budgets, lb_trials, seed, csv_path);
        if (verify->parsed()) return cmd_verify(seed);
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kExitParse;
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return kExitParse;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitModel;
    }
    return kExitOk;
}
