#include "mbda/discriminant.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace mbda {

namespace {

bool is_identity(const Matrix& m) {
    return m.rows() == m.cols() && m == Matrix::Identity(m.rows(), m.cols());
}

void check_samples(const std::vector<Tensor>& samples, const char* who) {
    if (samples.empty()) {
        throw std::invalid_argument(std::string(who) + ": empty sample set");
    }
    for (const Tensor& t : samples) {
        if (!t.same_dims(samples.front())) {
            throw std::invalid_argument(std::string(who) + ": samples have mismatched dims");
        }
    }
}

void check_config(const MbdaConfig& config, const std::vector<Index>& dims, const char* who) {
    if (config.target_dims.size() != dims.size()) {
        throw std::invalid_argument(std::string(who) +
                                    ": target_dims arity does not match tensor order");
    }
    for (size_t m = 0; m < dims.size(); ++m) {
        if (config.target_dims[m] < 1 || config.target_dims[m] > dims[m]) {
            throw std::invalid_argument(std::string(who) + ": target dim for mode " +
                                        std::to_string(m) + " must be in [1, extent]");
        }
    }
    if (config.max_iterations < 1) {
        throw std::invalid_argument(std::string(who) + ": max_iterations must be >= 1");
    }
    if (!(config.gamma > 0.0) || config.gamma > 1.0) {
        throw std::invalid_argument(std::string(who) + ": gamma must be in (0, 1]");
    }
}

// Accumulates sum_k (u_k - m_k)(u_k - m_k)^T over unfolding columns for
// every sample, as one Gram product per sample.
Matrix accumulate_scatter(const std::vector<Tensor>& samples, const Tensor& center,
                          const Subspace& subspace, int mode) {
    const Matrix center_unf = unfold(project_excluding(center, subspace, mode), mode);
    Matrix scatter = Matrix::Zero(center_unf.rows(), center_unf.rows());
    for (const Tensor& sample : samples) {
        const Matrix diff =
            unfold(project_excluding(sample, subspace, mode), mode) - center_unf;
        scatter.noalias() += diff * diff.transpose();
    }
    return scatter;
}

struct ObjectiveParts {
    double numerator = 0.0;
    double denominator = 0.0;
};

ObjectiveParts objective_parts(const std::vector<Tensor>& positives,
                               const std::vector<Tensor>& negatives, const Subspace& s) {
    const Tensor center = project(mean_tensor(positives), s);
    ObjectiveParts parts;
    for (const Tensor& y : negatives) {
        parts.numerator += sq_distance(project(y, s), center);
    }
    for (const Tensor& x : positives) {
        parts.denominator += sq_distance(project(x, s), center);
    }
    return parts;
}

// Solves one mode update and installs the transposed eigenvector block.
void update_mode(Subspace& subspace, int mode, const Matrix& s_y, const Matrix& s_x,
                 const MbdaConfig& config) {
    const Matrix discounted = config.gamma == 1.0 ? s_y : Matrix(config.gamma * s_y);
    const int k = static_cast<int>(config.target_dims[static_cast<size_t>(mode)]);
    EigenResult res = solve_generalized(discounted, s_x, k, config.eps);
    const Matrix vectors =
        config.sqrt_weighting ? weight_by_sqrt_eigenvalues(res) : res.eigenvectors;
    subspace.mats[static_cast<size_t>(mode)] = vectors.transpose();
}

}  // namespace

std::vector<Index> Subspace::input_dims() const {
    std::vector<Index> dims;
    dims.reserve(mats.size());
    for (const Matrix& m : mats) {
        dims.push_back(m.cols());
    }
    return dims;
}

std::vector<Index> Subspace::output_dims() const {
    std::vector<Index> dims;
    dims.reserve(mats.size());
    for (const Matrix& m : mats) {
        dims.push_back(m.rows());
    }
    return dims;
}

Subspace Subspace::identity(const std::vector<Index>& dims) {
    Subspace s;
    s.mats.reserve(dims.size());
    for (Index d : dims) {
        s.mats.push_back(Matrix::Identity(d, d));
    }
    return s;
}

ScatterPair scatter_pair_mode(const std::vector<Tensor>& positives,
                              const std::vector<Tensor>& negatives,
                              const Subspace& subspace, int mode) {
    check_samples(positives, "scatter_pair_mode(positives)");
    check_samples(negatives, "scatter_pair_mode(negatives)");
    if (!positives.front().same_dims(negatives.front())) {
        throw std::invalid_argument("scatter_pair_mode: positive/negative dims differ");
    }
    if (mode < 0 || mode >= positives.front().order()) {
        throw std::invalid_argument("scatter_pair_mode: invalid mode index");
    }

    ScatterPair pair;
    pair.centroid = mean_tensor(positives);
    pair.s_x = accumulate_scatter(positives, pair.centroid, subspace, mode);
    pair.s_y = accumulate_scatter(negatives, pair.centroid, subspace, mode);
    return pair;
}

Subspace fit_mbda(const std::vector<Tensor>& positives,
                  const std::vector<Tensor>& negatives, const MbdaConfig& config) {
    check_samples(positives, "fit_mbda(positives)");
    check_samples(negatives, "fit_mbda(negatives)");
    if (!positives.front().same_dims(negatives.front())) {
        throw std::invalid_argument("fit_mbda: positive/negative dims differ");
    }
    const std::vector<Index> dims = positives.front().dims();
    check_config(config, dims, "fit_mbda");

    const int order = static_cast<int>(dims.size());
    Subspace subspace = Subspace::identity(dims);
    double prev_objective = std::numeric_limits<double>::quiet_NaN();
    bool degenerate = false;

    for (int iter = 1; iter <= config.max_iterations && !degenerate; ++iter) {
        for (int mode = 0; mode < order; ++mode) {
            ScatterPair pair = scatter_pair_mode(positives, negatives, subspace, mode);
            update_mode(subspace, mode, pair.s_y, pair.s_x, config);
            if (iter >= 2) {
                const ObjectiveParts parts = objective_parts(positives, negatives, subspace);
                if (parts.denominator == 0.0) {
                    // Positives already collapse to a point; nothing left to optimize.
                    degenerate = true;
                    break;
                }
                subspace.objective_trace.push_back(parts.numerator / parts.denominator);
            }
        }
        subspace.iterations_run = iter;
        if (degenerate) {
            break;
        }
        if (iter >= 2) {
            const double current = subspace.objective_trace.back();
            if (std::isfinite(prev_objective) &&
                std::abs(current - prev_objective) <= config.tolerance * std::abs(prev_objective)) {
                break;
            }
            prev_objective = current;
        }
    }
    return subspace;
}

Matrix fit_bda(const std::vector<Vector>& positives,
               const std::vector<Vector>& negatives, int r, const MbdaConfig& config) {
    if (positives.empty() || negatives.empty()) {
        throw std::invalid_argument("fit_bda: both sample sets must be nonempty");
    }
    const Index dim = positives.front().size();
    for (const Vector& v : positives) {
        if (v.size() != dim) {
            throw std::invalid_argument("fit_bda: sample dims differ");
        }
    }
    for (const Vector& v : negatives) {
        if (v.size() != dim) {
            throw std::invalid_argument("fit_bda: sample dims differ");
        }
    }
    if (r < 1 || r > dim) {
        throw std::invalid_argument("fit_bda: target dim must be in [1, dim]");
    }
    if (!(config.gamma > 0.0) || config.gamma > 1.0) {
        throw std::invalid_argument("fit_bda: gamma must be in (0, 1]");
    }

    Vector centroid = Vector::Zero(dim);
    for (const Vector& x : positives) {
        centroid += x;
    }
    centroid /= static_cast<double>(positives.size());

    Matrix s_x = Matrix::Zero(dim, dim);
    for (const Vector& x : positives) {
        const Vector d = x - centroid;
        s_x.noalias() += d * d.transpose();
    }
    Matrix s_y = Matrix::Zero(dim, dim);
    for (const Vector& y : negatives) {
        const Vector d = y - centroid;
        s_y.noalias() += d * d.transpose();
    }
    if (config.gamma != 1.0) {
        s_y *= config.gamma;
    }

    EigenResult res = solve_generalized(s_y, s_x, r, config.eps);
    return config.sqrt_weighting ? weight_by_sqrt_eigenvalues(res) : res.eigenvectors;
}

Subspace fit_mda(const std::vector<Tensor>& class_a,
                 const std::vector<Tensor>& class_b, const MbdaConfig& config) {
    check_samples(class_a, "fit_mda(class_a)");
    check_samples(class_b, "fit_mda(class_b)");
    if (class_a.size() < 2 || class_b.size() < 2) {
        throw std::invalid_argument("fit_mda: each class needs at least 2 samples");
    }
    if (!class_a.front().same_dims(class_b.front())) {
        throw std::invalid_argument("fit_mda: class dims differ");
    }
    const std::vector<Index> dims = class_a.front().dims();
    check_config(config, dims, "fit_mda");

    const double n_a = static_cast<double>(class_a.size());
    const double n_b = static_cast<double>(class_b.size());
    const Tensor mean_a = mean_tensor(class_a);
    const Tensor mean_b = mean_tensor(class_b);
    Tensor global(dims);
    global.values() = (n_a * mean_a.values() + n_b * mean_b.values()) / (n_a + n_b);

    const int order = static_cast<int>(dims.size());
    Subspace subspace = Subspace::identity(dims);
    double prev_objective = std::numeric_limits<double>::quiet_NaN();
    bool degenerate = false;

    auto mda_objective = [&]() -> ObjectiveParts {
        ObjectiveParts parts;
        const Tensor pg = project(global, subspace);
        parts.numerator = n_a * sq_distance(project(mean_a, subspace), pg) +
                          n_b * sq_distance(project(mean_b, subspace), pg);
        const Tensor pa = project(mean_a, subspace);
        const Tensor pb = project(mean_b, subspace);
        for (const Tensor& t : class_a) {
            parts.denominator += sq_distance(project(t, subspace), pa);
        }
        for (const Tensor& t : class_b) {
            parts.denominator += sq_distance(project(t, subspace), pb);
        }
        return parts;
    };

    for (int iter = 1; iter <= config.max_iterations && !degenerate; ++iter) {
        for (int mode = 0; mode < order; ++mode) {
            const Matrix ga = unfold(project_excluding(mean_a, subspace, mode), mode);
            const Matrix gb = unfold(project_excluding(mean_b, subspace, mode), mode);
            const Matrix gm = unfold(project_excluding(global, subspace, mode), mode);
            const Matrix da = ga - gm;
            const Matrix db = gb - gm;
            Matrix between = n_a * (da * da.transpose()) + n_b * (db * db.transpose());
            Matrix within = accumulate_scatter(class_a, mean_a, subspace, mode);
            within += accumulate_scatter(class_b, mean_b, subspace, mode);

            MbdaConfig mode_config = config;
            mode_config.gamma = 1.0;  // symmetric treatment: no discounting
            update_mode(subspace, mode, between, within, mode_config);
            if (iter >= 2) {
                const ObjectiveParts parts = mda_objective();
                if (parts.denominator == 0.0) {
                    degenerate = true;
                    break;
                }
                subspace.objective_trace.push_back(parts.numerator / parts.denominator);
            }
        }
        subspace.iterations_run = iter;
        if (degenerate) {
            break;
        }
        if (iter >= 2) {
            const double current = subspace.objective_trace.back();
            if (std::isfinite(prev_objective) &&
                std::abs(current - prev_objective) <= config.tolerance * std::abs(prev_objective)) {
                break;
            }
            prev_objective = current;
        }
    }
    return subspace;
}

Tensor project(const Tensor& z, const Subspace& s) {
    if (z.order() != s.order()) {
        throw std::invalid_argument("project: tensor order does not match subspace");
    }
    Tensor out = z;
    for (int mode = 0; mode < s.order(); ++mode) {
        const Matrix& w = s.mats[static_cast<size_t>(mode)];
        if (w.cols() != out.dim(mode)) {
            throw std::invalid_argument("project: extent mismatch at mode " +
                                        std::to_string(mode));
        }
        if (!is_identity(w)) {
            out = mode_product(out, w, mode);
        }
    }
    return out;
}

Tensor project_excluding(const Tensor& z, const Subspace& s, int skip_mode) {
    if (z.order() != s.order()) {
        throw std::invalid_argument("project_excluding: tensor order does not match subspace");
    }
    Tensor out = z;
    for (int mode = 0; mode < s.order(); ++mode) {
        if (mode == skip_mode) {
            continue;
        }
        const Matrix& w = s.mats[static_cast<size_t>(mode)];
        if (!is_identity(w)) {
            out = mode_product(out, w, mode);
        }
    }
    return out;
}

double objective(const std::vector<Tensor>& positives,
                 const std::vector<Tensor>& negatives, const Subspace& s) {
    check_samples(positives, "objective(positives)");
    check_samples(negatives, "objective(negatives)");
    const ObjectiveParts parts = objective_parts(positives, negatives, s);
    if (parts.denominator == 0.0) {
        throw DegenerateScatterError("objective: projected positive scatter is zero");
    }
    return parts.numerator / parts.denominator;
}

}  // namespace mbda
