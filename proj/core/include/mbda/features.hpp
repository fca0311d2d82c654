#pragma once

#include "mbda/config.hpp"
#include "mbda/dataset.hpp"
#include "mbda/discriminant.hpp"
#include "mbda/gabor.hpp"
#include "mbda/geometric.hpp"

#include <set>
#include <string>
#include <vector>

namespace mbda {

/// The four experiment arms: full multilinear appearance, per-slice
/// two-directional reduction followed by vector BDA, the symmetric Fisher
/// baseline, and landmarks only. All but the last append the same
/// two-directional geometric feature.
enum class Method { kMbda, kTwodbdaBda, kMda, kGeometricOnly };

Method method_from_string(const std::string& name);
std::string method_name(Method method);
std::vector<Method> all_methods();

struct PipelineConfig {
    int t_target = 5;
    Index downsample = 2;
    Index gabor_orientations = 4;
    Index gabor_scales = 2;
    double gabor_base_wavelength = 3.0;
    std::vector<Index> appearance_dims = {3, 4, 1, 1};
    Index geometric_rows = 4;
    Index geometric_cols = 2;
    Index slice_rows = 2;
    Index slice_cols = 2;
    Index bda_rank = 12;
    /// Keep this many highest-variance coordinates before the vector BDA
    /// (<= 0 keeps all).
    Index bda_preselect = 96;
    int mbda_max_iterations = 5;
    double mbda_tolerance = 1e-4;
    double mbda_gamma = 1.0;
    /// Scale fitted directions by the square roots of their eigenvalues so
    /// the kernel distances emphasize the most discriminative coordinates.
    bool mbda_sqrt_weighting = true;
    double svm_c = 10.0;
    double svm_c_positive = 0.0;
    double svm_gamma = 0.0;  // <= 0: scale-aware default per detector
    double svm_tol = 1e-3;
    std::vector<int> upper_aus = {1, 2, 4, 5, 6, 7};
    bool use_geometric = true;
};

PipelineConfig pipeline_config_from(const ConfigMap& config);
GaborBank bank_from(const PipelineConfig& config);

/// Model inputs for one sequence: the Gabor difference tensor (order 0 when
/// appearance was not prepared) and the displacement matrices of both
/// landmark regions.
struct PreparedSample {
    std::string id;
    int subject = 0;
    bool test_split = false;
    std::set<int> labels;
    Tensor appearance;
    Matrix disp_upper;
    Matrix disp_lower;
};

PreparedSample prepare_sample(const SequenceSample& sample, const GaborBank& bank,
                              const PipelineConfig& config, bool need_appearance);

/// Fitted transforms of one AU detector; unused parts stay empty.
struct ArmModel {
    Subspace appearance;           // order-4 multilinear map
    std::vector<Subspace> slices;  // per-(kernel, frame) two-directional maps
    std::vector<Index> selection;  // coordinates kept before the vector BDA
    Matrix bda;                    // (selected dim x rank), columns are directions
    Subspace geometric;            // order-2 map on displacement matrices
    /// Per-part variance equalizers fitted on training data. Without them
    /// the pixel-scale landmark part dwarfs the filter-response part inside
    /// the shared Gaussian kernel. Plain scalars keep the feature map linear.
    double appearance_scale = 1.0;
    double geometric_scale = 1.0;
};

struct BuiltFeatures {
    ArmModel model;
    std::vector<Vector> features;  // parallel to the input sample order
};

/// Fits the transforms of the chosen arm on the given samples and returns
/// the training features. Positives are the samples whose label set contains
/// `au`; throws when either side is empty.
BuiltFeatures build_arm_features(const std::vector<const PreparedSample*>& samples, int au,
                                 Method method, const PipelineConfig& config);

// Single-arm entry points (thin wrappers over build_arm_features).
BuiltFeatures build_mbda_features(const std::vector<const PreparedSample*>& samples, int au,
                                  const PipelineConfig& config);
BuiltFeatures build_2dbda_bda_features(const std::vector<const PreparedSample*>& samples, int au,
                                       const PipelineConfig& config);

/// Applies fitted transforms to one sample; `upper_region` picks which
/// displacement matrix feeds the geometric part.
Vector arm_feature(const ArmModel& model, const PreparedSample& sample, bool upper_region);

}  // namespace mbda
