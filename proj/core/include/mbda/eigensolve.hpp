#pragma once

#include "mbda/tensor.hpp"

#include <stdexcept>

namespace mbda {

/// Thrown when S_x + eps*I stays indefinite after the escalation policy.
struct NotPositiveDefiniteError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Sentinel regularizer: resolve to 1e-6 * trace(S_x) / dim at solve time.
inline constexpr double kAutoRegularization = -1.0;

/// Spectrum of a symmetric (or symmetric-definite generalized) problem.
/// Eigenvalues are sorted descending; column i of `eigenvectors` pairs with
/// eigenvalue i and has unit Euclidean norm. The entry of largest magnitude
/// in each eigenvector is made positive.
struct EigenResult {
    Vector eigenvalues;
    Matrix eigenvectors;
    double eps_used = 0.0;  // regularization actually applied (generalized solves)
};

/// Scale-aware default regularizer, 1e-6 * trace(S) / dim.
double default_regularization(const Matrix& s);

/// Full spectrum of a symmetric matrix via cyclic Jacobi sweeps.
/// The input is symmetrized internally; must be square.
EigenResult sym_eig(const Matrix& s);

/// Top-k pairs of S_y a = lambda (S_x + eps*I) a, lambda descending.
///
/// Method: Cholesky-whiten S_x + eps*I, solve the resulting symmetric
/// standard problem, back-transform. Pass kAutoRegularization for eps to
/// use the scale-aware default. If the Cholesky factorization fails, eps is
/// escalated by 10x up to three times (starting from the scale-aware
/// default when the current value is zero) before giving up.
EigenResult solve_generalized(const Matrix& s_y, const Matrix& s_x, int k, double eps);

/// Scales column i of the eigenvector matrix by sqrt(eigenvalue i).
/// Negative eigenvalues are clamped to zero; when that happens and
/// `clamped_negative` is non-null it is set to true.
Matrix weight_by_sqrt_eigenvalues(const EigenResult& result, bool* clamped_negative = nullptr);

}  // namespace mbda
