#pragma once

#include "mbda/classify.hpp"
#include "mbda/features.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace mbda {

/// One trained AU detector: the arm's fitted transforms plus the SVM.
struct AuDetector {
    int au = 0;
    bool upper_region = false;  // which landmark band feeds the geometric part
    ArmModel model;
    SvmModel svm;
};

/// Everything needed to evaluate: self-contained and serializable.
struct ModelBundle {
    std::uint32_t version = 1;
    std::string method;
    std::string config_echo;
    std::vector<int> vocabulary;
    std::vector<std::string> warnings;  // AUs skipped during training
    std::vector<AuDetector> detectors;
};

void save_bundle(const std::string& path, const ModelBundle& bundle);
ModelBundle load_bundle(const std::string& path);

/// Human-readable bundle metadata (method, vocabulary, per-AU shapes).
std::string inspect_bundle(const ModelBundle& bundle);

/// Canonical flat-text echo of the effective configuration.
std::string config_echo(const PipelineConfig& config);

struct PreparedDataset {
    Manifest manifest;
    std::vector<PreparedSample> samples;
};

/// Loads every sequence under root and converts it to model inputs; enforces
/// subject-disjoint splits. Appearance tensors are computed only on demand.
PreparedDataset prepare_dataset(const std::string& root, const PipelineConfig& config,
                                bool need_appearance);

/// Trains one detector per vocabulary AU on the training split. AUs without
/// positive (or without negative) training sequences are skipped with a
/// warning recorded in the bundle.
ModelBundle train_pipeline(const PreparedDataset& dataset, Method method,
                           const PipelineConfig& config);

/// Predicts the AU set of every sequence in the chosen split and aggregates
/// the outcomes. Throws when the split is empty or when the bundle
/// vocabulary does not cover the dataset labels.
Metrics eval_pipeline(const ModelBundle& bundle, const PreparedDataset& dataset,
                      bool on_train_split = false);

void write_metrics_report(const std::string& out_dir, const Metrics& metrics,
                          const std::string& echo);

struct CompareRow {
    std::string method;
    Metrics metrics;
};

/// Runs all four arms on the shared prepared dataset.
std::vector<CompareRow> compare(const PreparedDataset& dataset, const PipelineConfig& config);

void write_compare_report(const std::string& out_dir, const std::vector<CompareRow>& rows);

}  // namespace mbda
