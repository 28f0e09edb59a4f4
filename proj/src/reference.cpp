#include "ddwalk/reference.hpp"

#include <algorithm>
#include <cmath>

#include "ddwalk/errors.hpp"

namespace ddwalk {
namespace reference {

namespace {

double inf_norm(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

std::vector<double> apply_dense(const std::vector<double>& a, int n,
                                const std::vector<double>& x) {
    std::vector<double> y(n, 0.0);
    for (int i = 0; i < n; ++i) {
        double acc = 0.0;
        for (int j = 0; j < n; ++j) acc += a[i * n + j] * x[j];
        y[i] = acc;
    }
    return y;
}

void check_symmetric(const std::vector<double>& a, int n) {
    double scale = 0.0;
    for (double x : a) scale = std::max(scale, std::abs(x));
    const double tol = 1e-12 * std::max(1.0, scale);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (std::abs(a[i * n + j] - a[j * n + i]) > tol)
                throw NotSymmetric("matrix is not symmetric");
}

}  // namespace

std::vector<double> to_dense(const SparseDDSystem& s) {
    const int n = s.n();
    std::vector<double> a(static_cast<std::size_t>(n) * n, 0.0);
    for (int u = 0; u < n; ++u) {
        a[static_cast<std::size_t>(u) * n + u] = s.diag(u);
        const auto cols = s.row_cols(u);
        const auto w = s.row_weights(u);
        for (std::size_t p = 0; p < cols.size(); ++p)
            a[static_cast<std::size_t>(u) * n + cols[p]] = w[p];
    }
    return a;
}

DenseSolveResult dense_solve(const std::vector<double>& a_dense,
                             const std::vector<double>& b) {
    const int n = static_cast<int>(b.size());
    if (n > 5000) throw TooLarge("dense_solve limited to n <= 5000");
    std::vector<double> a = a_dense;
    std::vector<double> rhs = b;
    std::vector<double> row_norm(n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            row_norm[i] = std::max(row_norm[i], std::abs(a[i * n + j]));

    DenseSolveResult res;
    std::vector<int> perm(n);
    for (int i = 0; i < n; ++i) perm[i] = i;

    for (int k = 0; k < n; ++k) {
        int piv = k;
        for (int i = k + 1; i < n; ++i)
            if (std::abs(a[perm[i] * n + k]) > std::abs(a[perm[piv] * n + k])) piv = i;
        std::swap(perm[k], perm[piv]);
        const int pk = perm[k];
        const double pivot = a[pk * n + k];
        if (std::abs(pivot) < 1e-12 * std::max(1.0, row_norm[pk])) {
            res.singular_flag = true;
            return res;
        }
        for (int i = k + 1; i < n; ++i) {
            const int pi = perm[i];
            const double m = a[pi * n + k] / pivot;
            if (m == 0.0) continue;
            for (int j = k; j < n; ++j) a[pi * n + j] -= m * a[pk * n + j];
            rhs[pi] -= m * rhs[pk];
        }
    }

    res.z.assign(n, 0.0);
    for (int i = n - 1; i >= 0; --i) {
        const int pi = perm[i];
        double acc = rhs[pi];
        for (int j = i + 1; j < n; ++j) acc -= a[pi * n + j] * res.z[j];
        res.z[i] = acc / a[pi * n + i];
    }

    const auto sz = apply_dense(a_dense, n, res.z);
    double r = 0.0;
    for (int i = 0; i < n; ++i) r = std::max(r, std::abs(sz[i] - b[i]));
    res.residual_inf = r;
    return res;
}

DenseSolveResult dense_solve(const SparseDDSystem& s) {
    return dense_solve(to_dense(s), s.b_vec());
}

bool jacobi_eigensymm(std::vector<double> a, int n, std::vector<double>& eigvals,
                      std::vector<double>& eigvecs) {
    eigvecs.assign(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) eigvecs[i * n + i] = 1.0;

    const int max_sweeps = 100;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) off += a[p * n + q] * a[p * n + q];
        double diag_scale = 0.0;
        for (int i = 0; i < n; ++i) diag_scale = std::max(diag_scale, std::abs(a[i * n + i]));
        if (std::sqrt(off) <= 1e-14 * std::max(1.0, diag_scale) * n) {
            eigvals.resize(n);
            for (int i = 0; i < n; ++i) eigvals[i] = a[i * n + i];
            return true;
        }
        for (int p = 0; p < n; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double apq = a[p * n + q];
                if (apq == 0.0) continue;
                const double app = a[p * n + p];
                const double aqq = a[q * n + q];
                const double theta = (aqq - app) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (int i = 0; i < n; ++i) {
                    const double aip = a[i * n + p];
                    const double aiq = a[i * n + q];
                    a[i * n + p] = c * aip - s * aiq;
                    a[i * n + q] = s * aip + c * aiq;
                }
                for (int j = 0; j < n; ++j) {
                    const double apj = a[p * n + j];
                    const double aqj = a[q * n + j];
                    a[p * n + j] = c * apj - s * aqj;
                    a[q * n + j] = s * apj + c * aqj;
                }
                for (int i = 0; i < n; ++i) {
                    const double vip = eigvecs[i * n + p];
                    const double viq = eigvecs[i * n + q];
                    eigvecs[i * n + p] = c * vip - s * viq;
                    eigvecs[i * n + q] = s * vip + c * viq;
                }
            }
        }
    }
    return false;
}

DenseSolveResult pseudo_solve_symmetric(const SparseDDSystem& s,
                                        const std::vector<double>& b) {
    const int n = s.n();
    if (n > 2000) throw TooLarge("pseudo_solve_symmetric limited to n <= 2000");
    const auto a = to_dense(s);
    check_symmetric(a, n);

    std::vector<double> w, v;
    if (!jacobi_eigensymm(a, n, w, v))
        throw NonConvergence("Jacobi eigensolver did not converge");

    double wmax = 0.0;
    for (double x : w) wmax = std::max(wmax, std::abs(x));
    const double cutoff = 1e-10 * wmax;

    // z = V Sigma^+ V^T b
    std::vector<double> vtb(n, 0.0);
    for (int j = 0; j < n; ++j) {
        double acc = 0.0;
        for (int i = 0; i < n; ++i) acc += v[i * n + j] * b[i];
        vtb[j] = std::abs(w[j]) <= cutoff ? 0.0 : acc / w[j];
    }
    DenseSolveResult res;
    res.z.assign(n, 0.0);
    bool singular = false;
    for (int j = 0; j < n; ++j)
        if (std::abs(w[j]) <= cutoff) singular = true;
    res.singular_flag = singular;
    for (int i = 0; i < n; ++i) {
        double acc = 0.0;
        for (int j = 0; j < n; ++j) acc += v[i * n + j] * vtb[j];
        res.z[i] = acc;
    }
    const auto sz = apply_dense(to_dense(s), n, res.z);
    double r = 0.0;
    for (int i = 0; i < n; ++i) r = std::max(r, std::abs(sz[i] - b[i]));
    res.residual_inf = r;
    return res;
}

DenseSolveResult pseudo_solve_symmetric(const SparseDDSystem& s) {
    return pseudo_solve_symmetric(s, s.b_vec());
}

double kappa_inf(const SparseDDSystem& s) {
    const int n = s.n();
    if (n > 2000) throw TooLarge("kappa_inf limited to n <= 2000");
    const auto a = to_dense(s);

    double norm_s = 0.0;
    for (int i = 0; i < n; ++i) {
        double row = 0.0;
        for (int j = 0; j < n; ++j) row += std::abs(a[i * n + j]);
        norm_s = std::max(norm_s, row);
    }

    // Columns of the (pseudo-)inverse: solve S x = e_j.
    bool symmetric = true;
    try {
        check_symmetric(a, n);
    } catch (const NotSymmetric&) {
        symmetric = false;
    }

    std::vector<double> inv(static_cast<std::size_t>(n) * n, 0.0);
    if (symmetric) {
        std::vector<double> w, v;
        if (!jacobi_eigensymm(a, n, w, v))
            throw NonConvergence("Jacobi eigensolver did not converge");
        double wmax = 0.0;
        for (double x : w) wmax = std::max(wmax, std::abs(x));
        const double cutoff = 1e-10 * wmax;
        // inv = V Sigma^+ V^T
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                double acc = 0.0;
                for (int k = 0; k < n; ++k)
                    if (std::abs(w[k]) > cutoff)
                        acc += v[i * n + k] * v[j * n + k] / w[k];
                inv[i * n + j] = acc;
            }
    } else {
        for (int j = 0; j < n; ++j) {
            std::vector<double> e(n, 0.0);
            e[j] = 1.0;
            const auto col = dense_solve(a, e);
            if (col.singular_flag)
                throw SingularNonSymmetric(
                    "kappa_inf of a singular non-symmetric matrix is undefined here");
            for (int i = 0; i < n; ++i) inv[i * n + j] = col.z[i];
        }
    }

    double norm_inv = 0.0;
    for (int i = 0; i < n; ++i) {
        double row = 0.0;
        for (int j = 0; j < n; ++j) row += std::abs(inv[i * n + j]);
        norm_inv = std::max(norm_inv, row);
    }
    return norm_s * norm_inv;
}

bool in_range(const SparseDDSystem& s, const std::vector<double>& b) {
    const auto res = pseudo_solve_symmetric(s, b);
    return res.residual_inf <= 1e-8 * std::max(1.0, inf_norm(b));
}

std::vector<double> fj_fixed_point(
    const std::vector<std::pair<std::pair<int, int>, double>>& edges, int n,
    const std::vector<double>& innate, double tol, int max_iters) {
    if (static_cast<int>(innate.size()) != n)
        throw DimensionMismatch("innate opinion length != n");
    for (double v : innate)
        if (!(v >= 0.0 && v <= 1.0))
            throw OpinionOutOfRange("innate opinion outside [0,1]");

    std::vector<std::vector<std::pair<int, double>>> adj(n);
    std::vector<double> wdeg(n, 0.0);
    for (const auto& [uv, w] : edges) {
        auto [u, v] = uv;
        if (!(w > 0.0)) throw NegativeWeight("FJ edge weight must be positive");
        adj[u].push_back({v, w});
        adj[v].push_back({u, w});
        wdeg[u] += w;
        wdeg[v] += w;
    }

    std::vector<double> z = innate;
    std::vector<double> next(n);
    for (int it = 0; it < max_iters; ++it) {
        double gap = 0.0;
        for (int u = 0; u < n; ++u) {
            double acc = innate[u];
            for (const auto& [v, w] : adj[u]) acc += w * z[v];
            next[u] = acc / (1.0 + wdeg[u]);
            gap = std::max(gap, std::abs(next[u] - z[u]));
        }
        z.swap(next);
        if (gap <= tol) return z;
    }
    throw NonConvergence("fj_fixed_point hit max_iters before reaching tol");
}

}  // namespace reference
}  // namespace ddwalk
