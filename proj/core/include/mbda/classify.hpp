#pragma once

#include "mbda/tensor.hpp"

#include <map>
#include <set>
#include <string>
#include <vector>

namespace mbda {

/// Gaussian-kernel SVM in dual form. dual_coefs[i] is alpha_i * y_i for
/// support vector i (row i of support_vectors).
struct SvmModel {
    Matrix support_vectors;
    Vector dual_coefs;
    double bias = 0.0;
    double gamma = 0.0;
    double c = 0.0;
};

struct SvmConfig {
    double c = 10.0;
    /// Optional separate box parameter for positive samples (0 = use c).
    double c_positive = 0.0;
    /// Kernel width; <= 0 selects 1 / (dim * pooled feature variance).
    double gamma = 0.0;
    double tol = 1e-3;
};

/// Per-sequence outcome: what the detectors said vs. the labeled truth.
struct AuPrediction {
    std::string sequence_id;
    std::set<int> predicted;
    std::set<int> truth;
};

/// One row of the evaluation grouped by ground-truth AU combination.
struct CombinationRow {
    std::vector<int> combination;  // sorted AU ids
    int total = 0;
    int exact = 0;
    int partial = 0;   // wrong but overlapping truth
    int disjoint = 0;  // no overlap with truth
    int extras = 0;    // sequences predicting at least one AU not in truth
};

struct Metrics {
    int total = 0;
    int exact_match = 0;
    int partial = 0;
    int disjoint = 0;
    double recognition_rate = 0.0;  // exact / total, as a fraction
    double false_alarm_rate = 0.0;  // extra-bearing / total, as a fraction
    std::vector<CombinationRow> rows;
};

/// Scale-aware kernel width: 1 / (dim * pooled per-coordinate variance).
double default_gamma(const std::vector<Vector>& features);

/// Sequential minimal optimization until no KKT violation exceeds tol.
/// Deterministic: no randomized working-set choices. Labels must be +-1
/// with both classes present.
SvmModel train_svm(const std::vector<Vector>& features, const std::vector<int>& labels,
                   const SvmConfig& config);

/// Sum of alpha_i y_i exp(-gamma ||sv_i - x||^2) + bias; the sign is the class.
double decision(const SvmModel& model, const Vector& x);

/// AUs whose detector fires (decision > 0) on the feature.
std::set<int> predict_au_set(const std::map<int, SvmModel>& detectors,
                             const Vector& feature);

/// Groups predictions by ground-truth combination and scores them: a
/// sequence is exact when predicted == truth, disjoint when the sets do not
/// overlap, partial otherwise. The false-alarm rate counts sequences whose
/// prediction contains at least one AU absent from truth.
Metrics evaluate(const std::vector<AuPrediction>& predictions);

/// Aligned text rendering of a metrics table (one row per combination).
std::string render_metrics_text(const Metrics& metrics);

}  // namespace mbda
