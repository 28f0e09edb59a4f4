#pragma once

#include <utility>
#include <vector>

#include "ddwalk/system.hpp"

namespace ddwalk {
namespace reference {

struct DenseSolveResult {
    std::vector<double> z;
    double residual_inf = 0.0;  // ||Sz - b||_inf
    bool singular_flag = false;
};

// Gaussian elimination with partial pivoting on the densified system, desk
// scale only (n <= 5000). singular_flag is set when a pivot collapses; z is
// then meaningless.
DenseSolveResult dense_solve(const SparseDDSystem& s);
DenseSolveResult dense_solve(const std::vector<double>& a_dense,
                             const std::vector<double>& b);

// z = V Sigma^+ V^T b for symmetric S via cyclic Jacobi rotations; eigenvalues
// with |lambda| <= 1e-10 max|lambda| treated as zero.
DenseSolveResult pseudo_solve_symmetric(const SparseDDSystem& s);
DenseSolveResult pseudo_solve_symmetric(const SparseDDSystem& s,
                                        const std::vector<double>& b);

// kappa_inf(S) = ||S||_inf ||S^-1||_inf, pseudo-inverse for singular
// symmetric S.
double kappa_inf(const SparseDDSystem& s);

// True iff b lies in the range of symmetric S (||S S^+ b - b||_inf small).
bool in_range(const SparseDDSystem& s, const std::vector<double>& b);

// Iterates the opinion update z_u <- (b_u + sum w_uv z_v) / (1 + sum w_uv)
// from z = innate until the sup-norm gap is below tol.
std::vector<double> fj_fixed_point(
    const std::vector<std::pair<std::pair<int, int>, double>>& edges, int n,
    const std::vector<double>& innate, double tol, int max_iters);

// Dense helpers shared with hardgen and tests.
std::vector<double> to_dense(const SparseDDSystem& s);
// Symmetric eigendecomposition A = V diag(w) V^T (column eigenvectors);
// returns false if the Jacobi sweep fails to converge.
bool jacobi_eigensymm(std::vector<double> a, int n, std::vector<double>& eigvals,
                      std::vector<double>& eigvecs);

}  // namespace reference
}  // namespace ddwalk
