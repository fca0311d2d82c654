#pragma once

#include "mbda/eigensolve.hpp"
#include "mbda/tensor.hpp"

#include <stdexcept>
#include <vector>

namespace mbda {

/// Thrown by objective() when the projected positive scatter is zero.
struct DegenerateScatterError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Settings for the alternating multilinear fits.
struct MbdaConfig {
    /// Target dimension per mode; must satisfy 1 <= d <= input extent.
    std::vector<Index> target_dims;
    int max_iterations = 5;
    /// Relative objective change between full iterations that counts as
    /// converged (checked from iteration 2 onward).
    double tolerance = 1e-4;
    /// Regularizer forwarded to solve_generalized; kAutoRegularization
    /// resolves to the scale-aware default.
    double eps = kAutoRegularization;
    /// Discount multiplier applied to the negative scatter before solving.
    double gamma = 1.0;
    /// Scale solved eigenvectors by the square roots of their eigenvalues.
    bool sqrt_weighting = false;
};

/// Ordered per-mode projections learned by a multilinear fit.
///
/// mats[m] has shape (target dim x input extent) and left-multiplies mode-m
/// unfoldings, so projecting a sample is one mode product per mode.
struct Subspace {
    std::vector<Matrix> mats;
    int iterations_run = 0;
    /// Objective recorded after each mode update from iteration 2 onward.
    std::vector<double> objective_trace;

    int order() const { return static_cast<int>(mats.size()); }
    std::vector<Index> input_dims() const;
    std::vector<Index> output_dims() const;

    static Subspace identity(const std::vector<Index>& dims);
};

/// Per-mode scatter pair: negative scatter s_y, positive scatter s_x, both
/// accumulated over the columns of mode unfoldings of partially projected
/// samples centered on the positive centroid.
struct ScatterPair {
    Matrix s_y;
    Matrix s_x;
    Tensor centroid;  // raw (unprojected) positive centroid
};

/// Builds the mode-`mode` scatter pair given the current subspace matrices
/// for all other modes (the entry for `mode` itself is ignored).
ScatterPair scatter_pair_mode(const std::vector<Tensor>& positives,
                              const std::vector<Tensor>& negatives,
                              const Subspace& subspace, int mode);

/// Alternating multilinear biased fit: per iteration and mode, solve the
/// generalized eigenproblem on the mode scatter pair and update that mode's
/// matrix immediately. Works for any order >= 1; order 2 realizes the
/// two-directional matrix variant and order 1 reduces to fit_bda.
Subspace fit_mbda(const std::vector<Tensor>& positives,
                  const std::vector<Tensor>& negatives, const MbdaConfig& config);

/// Vector biased fit: scatter of positives and negatives about the positive
/// centroid, top-r generalized eigenvectors returned as a (dim x r) map
/// whose columns are the eigenvectors (project with w.transpose() * x).
Matrix fit_bda(const std::vector<Vector>& positives,
               const std::vector<Vector>& negatives, int r, const MbdaConfig& config);

/// Symmetric two-class multilinear Fisher baseline: per mode, between-class
/// scatter of the class means about the global mean (weighted by class
/// sizes) over within-class scatter, same alternating loop as fit_mbda.
Subspace fit_mda(const std::vector<Tensor>& class_a,
                 const std::vector<Tensor>& class_b, const MbdaConfig& config);

/// Applies every mode product in order; output dims are the target dims.
Tensor project(const Tensor& z, const Subspace& s);

/// Partial projection: applies every mode product except `skip_mode`.
Tensor project_excluding(const Tensor& z, const Subspace& s, int skip_mode);

/// Ratio of summed squared projected distances of negatives to positives
/// about the projected positive centroid. Throws DegenerateScatterError
/// when the denominator is zero.
double objective(const std::vector<Tensor>& positives,
                 const std::vector<Tensor>& negatives, const Subspace& s);

}  // namespace mbda
