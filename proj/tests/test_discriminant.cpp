#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "mbda/discriminant.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

using mbda::Index;
using mbda::Matrix;
using mbda::MbdaConfig;
using mbda::ScatterPair;
using mbda::Subspace;
using mbda::Tensor;
using mbda::Vector;

namespace {

std::mt19937_64 rng(424242);

double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

Tensor random_tensor(const std::vector<Index>& dims) {
    Tensor t(dims);
    for (Index i = 0; i < t.size(); ++i) {
        t.values()[i] = uniform(-1.0, 1.0);
    }
    return t;
}

std::vector<Tensor> random_samples(int n, const std::vector<Index>& dims) {
    std::vector<Tensor> out;
    out.reserve(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        out.push_back(random_tensor(dims));
    }
    return out;
}

Matrix random_matrix(Index rows, Index cols) {
    Matrix m(rows, cols);
    for (Index i = 0; i < rows; ++i) {
        for (Index j = 0; j < cols; ++j) {
            m(i, j) = uniform(-1.0, 1.0);
        }
    }
    return m;
}

Matrix random_orthogonal(Index n) {
    const Matrix a = random_matrix(n, n);
    Eigen::HouseholderQR<Matrix> qr(a);
    return qr.householderQ() * Matrix::Identity(n, n);
}

// Largest principal angle between the column spans of two matrices.
double max_principal_angle(const Matrix& a, const Matrix& b) {
    REQUIRE(a.rows() == b.rows());
    REQUIRE(a.cols() == b.cols());
    Eigen::HouseholderQR<Matrix> qa(a);
    Eigen::HouseholderQR<Matrix> qb(b);
    const Matrix oa = qa.householderQ() * Matrix::Identity(a.rows(), a.cols());
    const Matrix ob = qb.householderQ() * Matrix::Identity(b.rows(), b.cols());
    Eigen::JacobiSVD<Matrix> svd(oa.transpose() * ob);
    const double smin = std::clamp(svd.singularValues().minCoeff(), -1.0, 1.0);
    return std::acos(smin);
}

Tensor vector_tensor(const Vector& v) {
    return Tensor({v.size()}, v);
}

Subspace subspace_with(const std::vector<Index>& in_dims,
                       const std::vector<Index>& out_dims) {
    Subspace s = Subspace::identity(in_dims);
    for (size_t m = 0; m < in_dims.size(); ++m) {
        s.mats[m] = random_matrix(out_dims[m], in_dims[m]);
    }
    return s;
}

double trace_ratio(const Matrix& w, const ScatterPair& pair) {
    const double num = (w * pair.s_y * w.transpose()).trace();
    const double den = (w * pair.s_x * w.transpose()).trace();
    return num / den;
}

}  // namespace

TEST_CASE("scatter of a single positive at the centroid is zero") {
    const std::vector<Index> dims{3, 2, 2};
    const std::vector<Tensor> pos{random_tensor(dims)};
    const std::vector<Tensor> neg = random_samples(3, dims);
    const Subspace s = Subspace::identity(dims);
    for (int mode = 0; mode < 3; ++mode) {
        const ScatterPair pair = mbda::scatter_pair_mode(pos, neg, s, mode);
        CHECK(pair.s_x.norm() == 0.0);
        CHECK(pair.s_y.norm() > 0.0);
        CHECK((pair.s_y - pair.s_y.transpose()).norm() <= 1e-9 * pair.s_y.norm());
    }
}

TEST_CASE("order-1 scatter pair equals the plain vector scatters") {
    const Index d = 5;
    std::vector<Tensor> pos;
    std::vector<Tensor> neg;
    std::vector<Vector> pos_v;
    std::vector<Vector> neg_v;
    for (int i = 0; i < 4; ++i) {
        Vector v = random_matrix(d, 1).col(0);
        pos_v.push_back(v);
        pos.push_back(vector_tensor(v));
    }
    for (int i = 0; i < 6; ++i) {
        Vector v = random_matrix(d, 1).col(0);
        neg_v.push_back(v);
        neg.push_back(vector_tensor(v));
    }
    Vector centroid = Vector::Zero(d);
    for (const Vector& v : pos_v) {
        centroid += v;
    }
    centroid /= 4.0;
    Matrix want_sx = Matrix::Zero(d, d);
    for (const Vector& v : pos_v) {
        want_sx += (v - centroid) * (v - centroid).transpose();
    }
    Matrix want_sy = Matrix::Zero(d, d);
    for (const Vector& v : neg_v) {
        want_sy += (v - centroid) * (v - centroid).transpose();
    }

    const ScatterPair pair =
        mbda::scatter_pair_mode(pos, neg, Subspace::identity({d}), 0);
    CHECK((pair.s_x - want_sx).norm() <= 1e-12 * want_sx.norm());
    CHECK((pair.s_y - want_sy).norm() <= 1e-12 * want_sy.norm());
}

TEST_CASE("trace form of the mode scatters equals summed squared distances") {
    // For random partial projections and a random candidate w_j, the ratio
    // trace(w S_y w^T)/trace(w S_x w^T) must equal the distance-based
    // objective with mode j replaced by w. Checked for every mode.
    const std::vector<Index> dims{3, 2, 2};
    const std::vector<Index> targets{2, 1, 2};
    const std::vector<Tensor> pos = random_samples(4, dims);
    const std::vector<Tensor> neg = random_samples(5, dims);
    const Subspace s = subspace_with(dims, targets);
    for (int mode = 0; mode < 3; ++mode) {
        const ScatterPair pair = mbda::scatter_pair_mode(pos, neg, s, mode);
        const Matrix w = random_matrix(targets[static_cast<size_t>(mode)],
                                       dims[static_cast<size_t>(mode)]);
        Subspace candidate = s;
        candidate.mats[static_cast<size_t>(mode)] = w;
        const double by_distance = mbda::objective(pos, neg, candidate);
        const double by_trace = trace_ratio(w, pair);
        CHECK(by_distance == doctest::Approx(by_trace).epsilon(1e-10));
    }
}

TEST_CASE("theorem consistency holds over random instances and modes") {
    for (int trial = 0; trial < 20; ++trial) {
        const std::vector<Index> dims{2, 3, 2};
        const std::vector<Index> targets{2, 2, 1};
        const std::vector<Tensor> pos = random_samples(3 + trial % 3, dims);
        const std::vector<Tensor> neg = random_samples(4, dims);
        const Subspace s = subspace_with(dims, targets);
        for (int mode = 0; mode < 3; ++mode) {
            const ScatterPair pair = mbda::scatter_pair_mode(pos, neg, s, mode);
            const Matrix w = random_matrix(targets[static_cast<size_t>(mode)],
                                           dims[static_cast<size_t>(mode)]);
            Subspace candidate = s;
            candidate.mats[static_cast<size_t>(mode)] = w;
            const double by_distance = mbda::objective(pos, neg, candidate);
            const double by_trace = trace_ratio(w, pair);
            CHECK(by_distance == doctest::Approx(by_trace).epsilon(1e-10));
        }
    }
}

TEST_CASE("scatter_pair_mode input validation") {
    const std::vector<Index> dims{2, 2};
    const std::vector<Tensor> pos = random_samples(2, dims);
    const std::vector<Tensor> neg = random_samples(2, dims);
    const Subspace s = Subspace::identity(dims);
    CHECK_THROWS_AS(mbda::scatter_pair_mode({}, neg, s, 0), std::invalid_argument);
    CHECK_THROWS_AS(mbda::scatter_pair_mode(pos, {}, s, 0), std::invalid_argument);
    CHECK_THROWS_AS(mbda::scatter_pair_mode(pos, random_samples(2, {2, 3}), s, 0),
                    std::invalid_argument);
    CHECK_THROWS_AS(mbda::scatter_pair_mode(pos, neg, s, 2), std::invalid_argument);
}

TEST_CASE("order-1 fit matches the vector fit") {
    const Index d = 5;
    const int r = 2;
    std::vector<Vector> pos_v;
    std::vector<Vector> neg_v;
    std::vector<Tensor> pos;
    std::vector<Tensor> neg;
    for (int i = 0; i < 6; ++i) {
        Vector v = random_matrix(d, 1).col(0);
        pos_v.push_back(v);
        pos.push_back(vector_tensor(v));
    }
    for (int i = 0; i < 7; ++i) {
        Vector v = random_matrix(d, 1).col(0);
        neg_v.push_back(v);
        neg.push_back(vector_tensor(v));
    }
    MbdaConfig config;
    config.target_dims = {r};
    config.eps = 1e-8;
    const Subspace s = mbda::fit_mbda(pos, neg, config);
    const Matrix w_bda = mbda::fit_bda(pos_v, neg_v, r, config);
    CHECK(max_principal_angle(s.mats[0].transpose(), w_bda) < 1e-6);
}

TEST_CASE("identical positives collapse to a point under the fit") {
    const std::vector<Index> dims{3, 2, 2};
    const Tensor t = random_tensor(dims);
    const std::vector<Tensor> pos{t, t, t};
    const std::vector<Tensor> neg = random_samples(4, dims);
    MbdaConfig config;
    config.target_dims = {1, 1, 1};
    config.eps = 1e-8;
    const Subspace s = mbda::fit_mbda(pos, neg, config);

    const Tensor center = mbda::project(mbda::mean_tensor(pos), s);
    double pos_scatter = 0.0;
    for (const Tensor& x : pos) {
        pos_scatter += mbda::sq_distance(mbda::project(x, s), center);
    }
    double neg_scatter = 0.0;
    for (const Tensor& y : neg) {
        neg_scatter += mbda::sq_distance(mbda::project(y, s), center);
    }
    CHECK(neg_scatter > 0.0);
    CHECK(pos_scatter <= 1e-12 * neg_scatter);
}

TEST_CASE("identical positives with zero eps surface the definiteness error") {
    const std::vector<Index> dims{2, 2};
    const Tensor t = random_tensor(dims);
    const std::vector<Tensor> pos{t, t};
    const std::vector<Tensor> neg = random_samples(3, dims);
    MbdaConfig config;
    config.target_dims = {1, 1};
    config.eps = 0.0;
    CHECK_THROWS_AS(mbda::fit_mbda(pos, neg, config), mbda::NotPositiveDefiniteError);
}

TEST_CASE("rank-1 objective trace is non-decreasing from iteration 2") {
    for (int trial = 0; trial < 5; ++trial) {
        const std::vector<Index> dims{3, 3, 2, 2};
        const std::vector<Tensor> pos = random_samples(6, dims);
        const std::vector<Tensor> neg = random_samples(6, dims);
        MbdaConfig config;
        config.target_dims = {1, 1, 1, 1};
        config.max_iterations = 5;
        config.tolerance = 0.0;
        config.eps = 0.0;
        const Subspace s = mbda::fit_mbda(pos, neg, config);
        REQUIRE(!s.objective_trace.empty());
        for (size_t i = 0; i + 1 < s.objective_trace.size(); ++i) {
            const double before = s.objective_trace[i];
            const double after = s.objective_trace[i + 1];
            CHECK(after >= before - 1e-9 * std::abs(before));
        }
        for (double v : s.objective_trace) {
            CHECK(std::isfinite(v));
            CHECK(v > 0.0);
        }
    }
}

TEST_CASE("multi-rank mode updates satisfy the eigen residual and improve") {
    const std::vector<Index> dims{4, 3, 2};
    const std::vector<Index> targets{2, 2, 1};
    const std::vector<Tensor> pos = random_samples(8, dims);
    const std::vector<Tensor> neg = random_samples(8, dims);
    Subspace s = Subspace::identity(dims);
    for (int iter = 0; iter < 3; ++iter) {
        for (int mode = 0; mode < 3; ++mode) {
            const ScatterPair pair = mbda::scatter_pair_mode(pos, neg, s, mode);
            // Rayleigh quotient of the current leading direction.
            const Vector prev = s.mats[static_cast<size_t>(mode)].row(0).transpose();
            const double prev_q = prev.dot(pair.s_y * prev) / prev.dot(pair.s_x * prev);
            const mbda::EigenResult res = mbda::solve_generalized(
                pair.s_y, pair.s_x, static_cast<int>(targets[static_cast<size_t>(mode)]),
                0.0);
            for (Index i = 0; i < res.eigenvalues.size(); ++i) {
                const Vector a = res.eigenvectors.col(i);
                const double num = (pair.s_y * a - res.eigenvalues[i] * (pair.s_x * a)).norm();
                const double den =
                    pair.s_y.norm() + std::abs(res.eigenvalues[i]) * pair.s_x.norm();
                CHECK(num <= 1e-8 * den);
            }
            CHECK(res.eigenvalues[0] >= prev_q - 1e-9 * std::abs(prev_q));
            s.mats[static_cast<size_t>(mode)] = res.eigenvectors.transpose();
        }
    }
}

TEST_CASE("mode-fiber rotation leaves mode eigenvalues unchanged") {
    const std::vector<Index> dims{4, 3, 2};
    const std::vector<Tensor> pos = random_samples(6, dims);
    const std::vector<Tensor> neg = random_samples(6, dims);
    const Matrix q = random_orthogonal(4);
    std::vector<Tensor> pos_rot;
    std::vector<Tensor> neg_rot;
    for (const Tensor& t : pos) {
        pos_rot.push_back(mbda::mode_product(t, q, 0));
    }
    for (const Tensor& t : neg) {
        neg_rot.push_back(mbda::mode_product(t, q, 0));
    }
    const Subspace s = Subspace::identity(dims);
    const ScatterPair base = mbda::scatter_pair_mode(pos, neg, s, 0);
    const ScatterPair rot = mbda::scatter_pair_mode(pos_rot, neg_rot, s, 0);
    const mbda::EigenResult res_base = mbda::solve_generalized(base.s_y, base.s_x, 4, 0.0);
    const mbda::EigenResult res_rot = mbda::solve_generalized(rot.s_y, rot.s_x, 4, 0.0);
    for (Index i = 0; i < 4; ++i) {
        CHECK(res_rot.eigenvalues[i] ==
              doctest::Approx(res_base.eigenvalues[i])
                  .epsilon(1e-8)
                  .scale(std::abs(res_base.eigenvalues[0])));
    }
}

TEST_CASE("vector fit hand example") {
    std::vector<Vector> pos(2, Vector(2));
    pos[0] << 0.0, 0.0;
    pos[1] << 1.0, 0.0;
    std::vector<Vector> neg(2, Vector(2));
    neg[0] << 0.5, 1.0;
    neg[1] << 0.5, -1.0;
    MbdaConfig config;
    config.target_dims = {1};
    config.eps = 1e-6;
    const Matrix w = mbda::fit_bda(pos, neg, 1, config);
    REQUIRE(w.rows() == 2);
    REQUIRE(w.cols() == 1);
    // Scatters about the positive centroid (0.5, 0): S_x = diag(0.5, 0),
    // S_y = diag(0, 2); the separating axis is e2.
    CHECK(std::abs(w(1, 0)) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(std::abs(w(0, 0)) < 1e-3);
}

TEST_CASE("duplicating negatives scales eigenvalues, not directions") {
    std::vector<Vector> pos;
    std::vector<Vector> neg;
    for (int i = 0; i < 4; ++i) {
        pos.push_back(random_matrix(3, 1).col(0));
        neg.push_back(random_matrix(3, 1).col(0));
    }
    std::vector<Vector> neg3;
    for (int rep = 0; rep < 3; ++rep) {
        neg3.insert(neg3.end(), neg.begin(), neg.end());
    }
    MbdaConfig config;
    config.target_dims = {3};
    config.eps = 1e-8;
    const Matrix w1 = mbda::fit_bda(pos, neg, 3, config);
    const Matrix w3 = mbda::fit_bda(pos, neg3, 3, config);
    for (Index i = 0; i < 3; ++i) {
        const double dot = std::abs(w1.col(i).dot(w3.col(i)));
        CHECK(dot == doctest::Approx(1.0).epsilon(1e-7));
    }
}

TEST_CASE("full-rank vector fit preserves geometry under back-transform") {
    std::vector<Vector> pos;
    std::vector<Vector> neg;
    for (int i = 0; i < 5; ++i) {
        pos.push_back(random_matrix(3, 1).col(0));
        neg.push_back(random_matrix(3, 1).col(0));
    }
    MbdaConfig config;
    config.target_dims = {3};
    config.eps = 1e-8;
    const Matrix w = mbda::fit_bda(pos, neg, 3, config);
    REQUIRE(std::abs(w.determinant()) > 1e-8);
    Vector centroid = Vector::Zero(3);
    for (const Vector& x : pos) {
        centroid += x;
    }
    centroid /= 5.0;
    const Matrix wt_inv = w.transpose().inverse();
    for (const Vector& x : pos) {
        const Vector projected = w.transpose() * (x - centroid);
        const Vector back = wt_inv * projected + centroid;
        CHECK((back - x).norm() <= 1e-8 * (x.norm() + 1.0));
    }
}

TEST_CASE("mirror-image classes align the baseline with the mean difference") {
    const Index d = 4;
    Vector base = Vector::Zero(d);
    base << 1.0, -0.5, 0.25, 0.75;
    // Isotropic +-axis offsets keep the within-class scatter proportional to
    // the identity, so the Fisher direction is exactly the mean difference.
    std::vector<Tensor> class_a;
    std::vector<Tensor> class_b;
    const double delta = 0.1;
    for (Index i = 0; i < d; ++i) {
        for (double sign : {1.0, -1.0}) {
            Vector offset = Vector::Zero(d);
            offset[i] = sign * delta;
            class_a.push_back(vector_tensor(base + offset));
            class_b.push_back(vector_tensor(-base + offset));
        }
    }
    MbdaConfig config;
    config.target_dims = {1};
    config.eps = 1e-8;
    const Subspace s = mbda::fit_mda(class_a, class_b, config);
    const Vector w = s.mats[0].row(0).transpose();
    const double cos = std::abs(w.dot(base.normalized()));
    CHECK(cos > 0.99);
}

TEST_CASE("identical classes yield a zero between-class objective") {
    const std::vector<Index> dims{3, 2};
    const std::vector<Tensor> samples = random_samples(5, dims);
    MbdaConfig config;
    config.target_dims = {2, 1};
    config.eps = 1e-8;
    const Subspace s = mbda::fit_mda(samples, samples, config);
    for (double v : s.objective_trace) {
        CHECK(std::abs(v) <= 1e-12);
    }
}

TEST_CASE("order-1 baseline reduces to two-class Fisher analysis") {
    const Index d = 5;
    std::vector<Tensor> class_a;
    std::vector<Tensor> class_b;
    std::vector<Vector> va;
    std::vector<Vector> vb;
    Vector mu_a = Vector::Zero(d);
    Vector mu_b = Vector::Zero(d);
    mu_a << 1.0, 0.0, 0.5, -1.0, 0.2;
    mu_b << -0.5, 0.3, 0.0, 0.8, -0.1;
    for (int i = 0; i < 10; ++i) {
        Vector a = mu_a + random_matrix(d, 1).col(0);
        Vector b = mu_b + random_matrix(d, 1).col(0);
        va.push_back(a);
        vb.push_back(b);
        class_a.push_back(vector_tensor(a));
        class_b.push_back(vector_tensor(b));
    }
    MbdaConfig config;
    config.target_dims = {1};
    config.eps = 0.0;
    const Subspace s = mbda::fit_mda(class_a, class_b, config);

    // Direct Fisher solve with a library eigensolver as the oracle.
    Vector mean_a = Vector::Zero(d);
    Vector mean_b = Vector::Zero(d);
    for (const Vector& v : va) {
        mean_a += v;
    }
    for (const Vector& v : vb) {
        mean_b += v;
    }
    mean_a /= 10.0;
    mean_b /= 10.0;
    const Vector global = 0.5 * (mean_a + mean_b);
    Matrix s_b = 10.0 * (mean_a - global) * (mean_a - global).transpose() +
                 10.0 * (mean_b - global) * (mean_b - global).transpose();
    Matrix s_w = Matrix::Zero(d, d);
    for (const Vector& v : va) {
        s_w += (v - mean_a) * (v - mean_a).transpose();
    }
    for (const Vector& v : vb) {
        s_w += (v - mean_b) * (v - mean_b).transpose();
    }
    Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> solver(s_b, s_w);
    const Vector fisher = solver.eigenvectors().col(d - 1);  // ascending order

    CHECK(max_principal_angle(s.mats[0].transpose(), fisher) < 1e-6);
}

TEST_CASE("fit_mda validates class sizes") {
    const std::vector<Index> dims{2, 2};
    MbdaConfig config;
    config.target_dims = {1, 1};
    CHECK_THROWS_AS(mbda::fit_mda(random_samples(1, dims), random_samples(3, dims), config),
                    std::invalid_argument);
}

TEST_CASE("projection basics") {
    const std::vector<Index> dims{3, 4, 2};
    const Tensor z = random_tensor(dims);

    SUBCASE("identity subspace is a no-op") {
        const Tensor p = mbda::project(z, Subspace::identity(dims));
        CHECK(mbda::sq_distance(p, z) == 0.0);
    }

    SUBCASE("output dims equal subspace output dims") {
        const Subspace s = subspace_with(dims, {2, 2, 1});
        const Tensor p = mbda::project(z, s);
        CHECK(p.dims() == std::vector<Index>({2, 2, 1}));
    }

    SUBCASE("dim mismatch throws") {
        const Subspace s = subspace_with({3, 4, 3}, {2, 2, 1});
        CHECK_THROWS_AS(mbda::project(z, s), std::invalid_argument);
    }
}

TEST_CASE("full-size projection reaches the 3x4x1x1 target shape") {
    const std::vector<Index> dims{57, 102, 16, 4};
    const Tensor z = random_tensor(dims);
    const Subspace s = subspace_with(dims, {3, 4, 1, 1});
    const Tensor p = mbda::project(z, s);
    CHECK(p.dims() == std::vector<Index>({3, 4, 1, 1}));
    CHECK(p.size() == 12);
}

TEST_CASE("projection order does not matter") {
    const std::vector<Index> dims{3, 4, 2, 2};
    const Tensor z = random_tensor(dims);
    const Subspace s = subspace_with(dims, {2, 3, 1, 2});
    const Tensor forward = mbda::project(z, s);
    Tensor reversed = z;
    for (int mode = 3; mode >= 0; --mode) {
        reversed = mbda::mode_product(reversed, s.mats[static_cast<size_t>(mode)], mode);
    }
    REQUIRE(forward.same_dims(reversed));
    const double scale = forward.values().cwiseAbs().maxCoeff();
    for (Index i = 0; i < forward.size(); ++i) {
        CHECK(std::abs(forward[i] - reversed[i]) <= 1e-10 * scale);
    }
}

TEST_CASE("projection is linear") {
    const std::vector<Index> dims{3, 3, 2};
    const Tensor z1 = random_tensor(dims);
    const Tensor z2 = random_tensor(dims);
    const Subspace s = subspace_with(dims, {2, 1, 2});
    const double a = 1.75;
    const double b = -0.5;
    Tensor combo(dims);
    combo.values() = a * z1.values() + b * z2.values();
    const Tensor lhs = mbda::project(combo, s);
    Tensor rhs(lhs.dims());
    rhs.values() = a * mbda::project(z1, s).values() + b * mbda::project(z2, s).values();
    const double scale = std::max(1.0, rhs.values().cwiseAbs().maxCoeff());
    for (Index i = 0; i < lhs.size(); ++i) {
        CHECK(std::abs(lhs[i] - rhs[i]) <= 1e-10 * scale);
    }
}

TEST_CASE("objective evaluator") {
    const std::vector<Index> dims{3, 2, 2};
    const std::vector<Tensor> pos = random_samples(4, dims);
    const Subspace s = subspace_with(dims, {2, 2, 1});

    SUBCASE("identical sets give exactly one") {
        CHECK(mbda::objective(pos, pos, s) == 1.0);
    }

    SUBCASE("doubling negative offsets quadruples the objective") {
        const Tensor centroid = mbda::mean_tensor(pos);
        std::vector<Tensor> neg = random_samples(5, dims);
        std::vector<Tensor> neg2;
        for (const Tensor& y : neg) {
            Tensor scaled(dims);
            scaled.values() = centroid.values() + 2.0 * (y.values() - centroid.values());
            neg2.push_back(scaled);
        }
        const double base = mbda::objective(pos, neg, s);
        const double doubled = mbda::objective(pos, neg2, s);
        CHECK(doubled == doctest::Approx(4.0 * base).epsilon(1e-12));
    }

    SUBCASE("zero positive scatter is reported distinctly") {
        const Tensor t = random_tensor(dims);
        const std::vector<Tensor> identical{t, t};
        const std::vector<Tensor> neg = random_samples(3, dims);
        CHECK_THROWS_AS(mbda::objective(identical, neg, s), mbda::DegenerateScatterError);
    }
}

TEST_CASE("fit configuration is validated") {
    const std::vector<Index> dims{3, 2};
    const std::vector<Tensor> pos = random_samples(3, dims);
    const std::vector<Tensor> neg = random_samples(3, dims);

    MbdaConfig bad_arity;
    bad_arity.target_dims = {1};
    CHECK_THROWS_AS(mbda::fit_mbda(pos, neg, bad_arity), std::invalid_argument);

    MbdaConfig bad_dim;
    bad_dim.target_dims = {4, 1};
    CHECK_THROWS_AS(mbda::fit_mbda(pos, neg, bad_dim), std::invalid_argument);

    MbdaConfig bad_gamma;
    bad_gamma.target_dims = {1, 1};
    bad_gamma.gamma = 0.0;
    CHECK_THROWS_AS(mbda::fit_mbda(pos, neg, bad_gamma), std::invalid_argument);
    bad_gamma.gamma = 1.5;
    CHECK_THROWS_AS(mbda::fit_mbda(pos, neg, bad_gamma), std::invalid_argument);

    MbdaConfig bad_iters;
    bad_iters.target_dims = {1, 1};
    bad_iters.max_iterations = 0;
    CHECK_THROWS_AS(mbda::fit_mbda(pos, neg, bad_iters), std::invalid_argument);

    CHECK_THROWS_AS(mbda::fit_mbda({}, neg, MbdaConfig{{1, 1}}), std::invalid_argument);
    CHECK_THROWS_AS(mbda::fit_mbda(pos, random_samples(2, {2, 2}), MbdaConfig{{1, 1}}),
                    std::invalid_argument);
}

TEST_CASE("gamma discounts the negative scatter's influence on eigenvalues") {
    const std::vector<Index> dims{4};
    const std::vector<Tensor> pos = random_samples(6, dims);
    const std::vector<Tensor> neg = random_samples(6, dims);
    MbdaConfig config;
    config.target_dims = {1};
    config.eps = 0.0;
    config.max_iterations = 1;
    const Subspace full = mbda::fit_mbda(pos, neg, config);
    config.gamma = 0.5;
    const Subspace half = mbda::fit_mbda(pos, neg, config);
    // Scaling S_y leaves directions untouched.
    const double dot = std::abs(full.mats[0].row(0).dot(half.mats[0].row(0)));
    CHECK(dot == doctest::Approx(1.0).epsilon(1e-9));
}
