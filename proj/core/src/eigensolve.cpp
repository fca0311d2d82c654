#include "mbda/eigensolve.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

namespace mbda {

namespace {

constexpr int kMaxJacobiSweeps = 100;
constexpr double kJacobiTolerance = 1e-12;

void check_square(const Matrix& s, const char* who) {
    if (s.rows() != s.cols()) {
        throw std::invalid_argument(std::string(who) + ": matrix must be square");
    }
    if (s.rows() < 1) {
        throw std::invalid_argument(std::string(who) + ": matrix must be nonempty");
    }
}

double offdiag_norm(const Matrix& a) {
    double acc = 0.0;
    for (Index p = 0; p < a.rows(); ++p) {
        for (Index q = p + 1; q < a.cols(); ++q) {
            acc += a(p, q) * a(p, q);
        }
    }
    return std::sqrt(2.0 * acc);
}

// Cyclic Jacobi on a symmetric matrix. Returns eigenvalues in `evals` and
// orthonormal eigenvectors as columns of `vecs`, unsorted.
void jacobi(Matrix a, Vector& evals, Matrix& vecs) {
    const Index n = a.rows();
    vecs = Matrix::Identity(n, n);
    const double norm = a.norm();  // invariant under the rotations

    if (norm > 0.0) {
        for (int sweep = 0; sweep < kMaxJacobiSweeps; ++sweep) {
            if (offdiag_norm(a) <= kJacobiTolerance * norm) {
                break;
            }
            for (Index p = 0; p < n - 1; ++p) {
                for (Index q = p + 1; q < n; ++q) {
                    const double apq = a(p, q);
                    if (apq == 0.0) {
                        continue;
                    }
                    const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                    const double sign = theta >= 0.0 ? 1.0 : -1.0;
                    const double t = sign / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                    const double c = 1.0 / std::sqrt(t * t + 1.0);
                    const double s = t * c;

                    const double app = a(p, p);
                    const double aqq = a(q, q);
                    a(p, p) = app - t * apq;
                    a(q, q) = aqq + t * apq;
                    a(p, q) = 0.0;
                    a(q, p) = 0.0;
                    for (Index i = 0; i < n; ++i) {
                        if (i == p || i == q) {
                            continue;
                        }
                        const double aip = a(i, p);
                        const double aiq = a(i, q);
                        a(i, p) = c * aip - s * aiq;
                        a(p, i) = a(i, p);
                        a(i, q) = s * aip + c * aiq;
                        a(q, i) = a(i, q);
                    }
                    for (Index i = 0; i < n; ++i) {
                        const double vip = vecs(i, p);
                        const double viq = vecs(i, q);
                        vecs(i, p) = c * vip - s * viq;
                        vecs(i, q) = s * vip + c * viq;
                    }
                }
            }
        }
    }
    evals = a.diagonal();
}

// Largest-magnitude entry of each column is made positive (first index wins
// on ties) so repeated runs serialize identically.
void fix_signs(Matrix& vecs) {
    for (Index j = 0; j < vecs.cols(); ++j) {
        Index arg = 0;
        double best = 0.0;
        for (Index i = 0; i < vecs.rows(); ++i) {
            const double mag = std::abs(vecs(i, j));
            if (mag > best) {
                best = mag;
                arg = i;
            }
        }
        if (vecs(arg, j) < 0.0) {
            vecs.col(j) = -vecs.col(j);
        }
    }
}

void sort_descending(Vector& evals, Matrix& vecs) {
    const Index n = evals.size();
    std::vector<Index> order(static_cast<size_t>(n));
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Index a, Index b) { return evals[a] > evals[b]; });
    Vector sorted_vals(n);
    Matrix sorted_vecs(vecs.rows(), n);
    for (Index i = 0; i < n; ++i) {
        sorted_vals[i] = evals[order[static_cast<size_t>(i)]];
        sorted_vecs.col(i) = vecs.col(order[static_cast<size_t>(i)]);
    }
    evals = std::move(sorted_vals);
    vecs = std::move(sorted_vecs);
}

// Lower Cholesky factor; returns false when a pivot is not strictly
// positive (or not finite), i.e. the matrix is not numerically PD.
bool cholesky(const Matrix& a, Matrix& l) {
    const Index n = a.rows();
    l = Matrix::Zero(n, n);
    for (Index j = 0; j < n; ++j) {
        double d = a(j, j);
        for (Index k = 0; k < j; ++k) {
            d -= l(j, k) * l(j, k);
        }
        if (!(d > 0.0) || !std::isfinite(d)) {
            return false;
        }
        l(j, j) = std::sqrt(d);
        for (Index i = j + 1; i < n; ++i) {
            double v = a(i, j);
            for (Index k = 0; k < j; ++k) {
                v -= l(i, k) * l(j, k);
            }
            l(i, j) = v / l(j, j);
        }
    }
    return true;
}

}  // namespace

double default_regularization(const Matrix& s) {
    check_square(s, "default_regularization");
    return 1e-6 * s.trace() / static_cast<double>(s.rows());
}

EigenResult sym_eig(const Matrix& s) {
    check_square(s, "sym_eig");
    const Matrix sym = 0.5 * (s + s.transpose());

    EigenResult result;
    jacobi(sym, result.eigenvalues, result.eigenvectors);
    sort_descending(result.eigenvalues, result.eigenvectors);
    fix_signs(result.eigenvectors);
    return result;
}

EigenResult solve_generalized(const Matrix& s_y, const Matrix& s_x, int k, double eps) {
    check_square(s_y, "solve_generalized");
    check_square(s_x, "solve_generalized");
    if (s_y.rows() != s_x.rows()) {
        throw std::invalid_argument("solve_generalized: operand sizes differ");
    }
    const Index n = s_x.rows();
    if (k < 1 || k > n) {
        throw std::invalid_argument("solve_generalized: k must be in [1, dim]");
    }

    const Matrix sy = 0.5 * (s_y + s_y.transpose());
    const Matrix sx = 0.5 * (s_x + s_x.transpose());

    double attempt = eps < 0.0 ? default_regularization(sx) : eps;
    Matrix l;
    bool ok = false;
    for (int tries = 0; tries < 4; ++tries) {
        Matrix reg = sx;
        reg.diagonal().array() += attempt;
        if (cholesky(reg, l)) {
            ok = true;
            break;
        }
        attempt = attempt > 0.0 ? attempt * 10.0 : default_regularization(sx);
        if (attempt <= 0.0) {
            break;
        }
    }
    if (!ok) {
        throw NotPositiveDefiniteError(
            "solve_generalized: S_x + eps*I is not positive definite "
            "(eps reached " + std::to_string(attempt) + ")");
    }

    // Whiten: B = L^-1 S_y L^-T is symmetric with the same eigenvalues.
    Matrix b = l.triangularView<Eigen::Lower>().solve(sy);
    b = l.triangularView<Eigen::Lower>().solve(Matrix(b.transpose()));
    b = 0.5 * (b + b.transpose());

    Vector evals;
    Matrix u;
    jacobi(b, evals, u);
    sort_descending(evals, u);

    EigenResult result;
    result.eps_used = attempt;
    result.eigenvalues = evals.head(k);
    result.eigenvectors = l.transpose().triangularView<Eigen::Upper>().solve(u.leftCols(k));
    for (Index j = 0; j < k; ++j) {
        const double norm = result.eigenvectors.col(j).norm();
        if (norm > 0.0) {
            result.eigenvectors.col(j) /= norm;
        }
    }
    fix_signs(result.eigenvectors);
    return result;
}

Matrix weight_by_sqrt_eigenvalues(const EigenResult& result, bool* clamped_negative) {
    Matrix weighted = result.eigenvectors;
    bool clamped = false;
    for (Index j = 0; j < weighted.cols(); ++j) {
        double lambda = result.eigenvalues[j];
        if (lambda < 0.0) {
            lambda = 0.0;
            clamped = true;
        }
        weighted.col(j) *= std::sqrt(lambda);
    }
    if (clamped_negative != nullptr) {
        *clamped_negative = clamped;
    }
    return weighted;
}

}  // namespace mbda
