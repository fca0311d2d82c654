#include "mbda/pipeline.hpp"

#include "mbda/io.hpp"

#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>
#include <stdexcept>

namespace mbda {

using nlohmann::json;

namespace {

std::string format_double(double v) {
    std::ostringstream out;
    out << std::setprecision(17) << v;
    return out.str();
}

std::string join_ints(const std::vector<int>& values) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += ',';
        out += std::to_string(values[i]);
    }
    return out;
}

std::string fnv1a_hex(const std::string& text) {
    std::uint64_t hash = 1469598103934665603ull;
    for (unsigned char c : text) {
        hash ^= c;
        hash *= 1099511628211ull;
    }
    std::ostringstream out;
    out << std::hex << std::setw(16) << std::setfill('0') << hash;
    return out.str();
}

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw std::runtime_error("cannot create " + dir + ": " + ec.message());
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << text;
    if (!out) throw std::runtime_error("write failed for " + path);
}

}  // namespace

std::string config_echo(const PipelineConfig& config) {
    ConfigMap map;
    std::vector<int> dims(config.appearance_dims.begin(), config.appearance_dims.end());
    map.set("appearance_dims", join_ints(dims));
    map.set("bda_preselect", std::to_string(config.bda_preselect));
    map.set("bda_rank", std::to_string(config.bda_rank));
    map.set("downsample", std::to_string(config.downsample));
    map.set("gabor_base_wavelength", format_double(config.gabor_base_wavelength));
    map.set("gabor_orientations", std::to_string(config.gabor_orientations));
    map.set("gabor_scales", std::to_string(config.gabor_scales));
    map.set("geometric_cols", std::to_string(config.geometric_cols));
    map.set("geometric_rows", std::to_string(config.geometric_rows));
    map.set("mbda_gamma", format_double(config.mbda_gamma));
    map.set("mbda_max_iterations", std::to_string(config.mbda_max_iterations));
    map.set("mbda_sqrt_weighting", config.mbda_sqrt_weighting ? "true" : "false");
    map.set("mbda_tolerance", format_double(config.mbda_tolerance));
    map.set("slice_cols", std::to_string(config.slice_cols));
    map.set("slice_rows", std::to_string(config.slice_rows));
    map.set("svm_c", format_double(config.svm_c));
    map.set("svm_c_positive", format_double(config.svm_c_positive));
    map.set("svm_gamma", format_double(config.svm_gamma));
    map.set("svm_tol", format_double(config.svm_tol));
    map.set("t_target", std::to_string(config.t_target));
    map.set("upper_aus", join_ints(config.upper_aus));
    map.set("use_geometric", config.use_geometric ? "true" : "false");
    return map.render();
}

void save_bundle(const std::string& path, const ModelBundle& bundle) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("save_bundle: cannot open " + path);
    out.write("AUMB", 4);
    io::write_u32(out, bundle.version);
    io::write_string(out, bundle.method);
    io::write_string(out, bundle.config_echo);
    io::write_u32(out, static_cast<std::uint32_t>(bundle.vocabulary.size()));
    for (int au : bundle.vocabulary) io::write_u32(out, static_cast<std::uint32_t>(au));
    io::write_u32(out, static_cast<std::uint32_t>(bundle.warnings.size()));
    for (const std::string& w : bundle.warnings) io::write_string(out, w);
    io::write_u32(out, static_cast<std::uint32_t>(bundle.detectors.size()));
    for (const AuDetector& det : bundle.detectors) {
        io::write_u32(out, static_cast<std::uint32_t>(det.au));
        io::write_u32(out, det.upper_region ? 1 : 0);
        io::write_u32(out, det.model.appearance.mats.empty() ? 0 : 1);
        if (!det.model.appearance.mats.empty()) save_subspace(out, det.model.appearance);
        io::write_u32(out, static_cast<std::uint32_t>(det.model.slices.size()));
        for (const Subspace& s : det.model.slices) save_subspace(out, s);
        io::write_u32(out, static_cast<std::uint32_t>(det.model.selection.size()));
        for (Index i : det.model.selection) io::write_u32(out, static_cast<std::uint32_t>(i));
        io::write_matrix(out, det.model.bda);
        io::write_u32(out, det.model.geometric.mats.empty() ? 0 : 1);
        if (!det.model.geometric.mats.empty()) save_subspace(out, det.model.geometric);
        io::write_f64(out, det.model.appearance_scale);
        io::write_f64(out, det.model.geometric_scale);
        save_svm(out, det.svm);
    }
    if (!out) throw std::runtime_error("save_bundle: write failed for " + path);
}

ModelBundle load_bundle(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("load_bundle: cannot open " + path);
    char magic[4];
    in.read(magic, 4);
    if (!in || std::string(magic, 4) != "AUMB")
        throw std::runtime_error("load_bundle: bad magic header in " + path);
    ModelBundle bundle;
    bundle.version = io::read_u32(in);
    if (bundle.version != 1)
        throw std::runtime_error("load_bundle: unsupported version in " + path);
    bundle.method = io::read_string(in);
    bundle.config_echo = io::read_string(in);
    const std::uint32_t vocab = io::read_u32(in);
    for (std::uint32_t i = 0; i < vocab; ++i)
        bundle.vocabulary.push_back(static_cast<int>(io::read_u32(in)));
    const std::uint32_t warnings = io::read_u32(in);
    for (std::uint32_t i = 0; i < warnings; ++i) bundle.warnings.push_back(io::read_string(in));
    const std::uint32_t detectors = io::read_u32(in);
    for (std::uint32_t i = 0; i < detectors; ++i) {
        AuDetector det;
        det.au = static_cast<int>(io::read_u32(in));
        det.upper_region = io::read_u32(in) != 0;
        if (io::read_u32(in) != 0) det.model.appearance = load_subspace(in);
        const std::uint32_t slices = io::read_u32(in);
        for (std::uint32_t s = 0; s < slices; ++s) det.model.slices.push_back(load_subspace(in));
        const std::uint32_t selection = io::read_u32(in);
        for (std::uint32_t s = 0; s < selection; ++s)
            det.model.selection.push_back(static_cast<Index>(io::read_u32(in)));
        det.model.bda = io::read_matrix(in);
        if (io::read_u32(in) != 0) det.model.geometric = load_subspace(in);
        det.model.appearance_scale = io::read_f64(in);
        det.model.geometric_scale = io::read_f64(in);
        det.svm = load_svm(in);
        bundle.detectors.push_back(std::move(det));
    }
    return bundle;
}

std::string inspect_bundle(const ModelBundle& bundle) {
    std::ostringstream out;
    out << "method: " << bundle.method << '\n';
    out << "format version: " << bundle.version << '\n';
    out << "vocabulary:";
    for (int au : bundle.vocabulary) out << ' ' << au;
    out << '\n';
    for (const std::string& w : bundle.warnings) out << "warning: " << w << '\n';
    for (const AuDetector& det : bundle.detectors) {
        out << "AU " << det.au << " (" << (det.upper_region ? "upper" : "lower") << " band):";
        if (!det.model.appearance.mats.empty()) {
            out << " appearance";
            for (Index d : det.model.appearance.output_dims()) out << ' ' << d;
            out << ';';
        }
        if (!det.model.slices.empty())
            out << ' ' << det.model.slices.size() << " slice maps -> rank "
                << det.model.bda.cols() << ';';
        if (!det.model.geometric.mats.empty()) {
            out << " geometric";
            for (Index d : det.model.geometric.output_dims()) out << ' ' << d;
            out << ';';
        }
        out << ' ' << det.svm.support_vectors.rows() << " support vectors\n";
    }
    return out.str();
}

PreparedDataset prepare_dataset(const std::string& root, const PipelineConfig& config,
                                bool need_appearance) {
    PreparedDataset dataset;
    dataset.manifest = load_manifest(root + "/manifest.json");
    check_split(dataset.manifest);
    GaborBank bank;
    if (need_appearance) bank = bank_from(config);
    dataset.samples.reserve(dataset.manifest.entries.size());
    for (const ManifestEntry& entry : dataset.manifest.entries) {
        SequenceSample raw = load_sample(root, entry, dataset.manifest.frame_count);
        dataset.samples.push_back(prepare_sample(raw, bank, config, need_appearance));
    }
    return dataset;
}

ModelBundle train_pipeline(const PreparedDataset& dataset, Method method,
                           const PipelineConfig& config) {
    std::vector<const PreparedSample*> train;
    for (const PreparedSample& s : dataset.samples)
        if (!s.test_split) train.push_back(&s);
    if (train.empty()) throw std::invalid_argument("train_pipeline: empty training split");

    ModelBundle bundle;
    bundle.method = method_name(method);
    bundle.config_echo = config_echo(config);
    bundle.vocabulary = dataset.manifest.au_vocabulary;
    std::sort(bundle.vocabulary.begin(), bundle.vocabulary.end());

    for (int au : bundle.vocabulary) {
        int positives = 0;
        for (const PreparedSample* s : train) positives += s->labels.count(au) ? 1 : 0;
        if (positives == 0) {
            bundle.warnings.push_back("AU " + std::to_string(au) +
                                      " skipped: no positive training sequences");
            continue;
        }
        if (positives == static_cast<int>(train.size())) {
            bundle.warnings.push_back("AU " + std::to_string(au) +
                                      " skipped: no negative training sequences");
            continue;
        }

        AuDetector det;
        det.au = au;
        det.upper_region = std::find(config.upper_aus.begin(), config.upper_aus.end(), au) !=
                           config.upper_aus.end();
        BuiltFeatures built = build_arm_features(train, au, method, config);
        det.model = std::move(built.model);

        std::vector<int> labels;
        labels.reserve(train.size());
        for (const PreparedSample* s : train) labels.push_back(s->labels.count(au) ? 1 : -1);
        SvmConfig svm_cfg;
        svm_cfg.c = config.svm_c;
        svm_cfg.c_positive = config.svm_c_positive;
        svm_cfg.gamma = config.svm_gamma > 0 ? config.svm_gamma : default_gamma(built.features);
        svm_cfg.tol = config.svm_tol;
        det.svm = train_svm(built.features, labels, svm_cfg);
        bundle.detectors.push_back(std::move(det));
    }
    return bundle;
}

Metrics eval_pipeline(const ModelBundle& bundle, const PreparedDataset& dataset,
                      bool on_train_split) {
    std::set<int> vocab(bundle.vocabulary.begin(), bundle.vocabulary.end());
    std::vector<AuPrediction> predictions;
    for (const PreparedSample& s : dataset.samples) {
        if (s.test_split == on_train_split) continue;
        for (int au : s.labels)
            if (!vocab.count(au))
                throw std::invalid_argument("eval_pipeline: dataset label AU " +
                                            std::to_string(au) +
                                            " is outside the bundle vocabulary");
        AuPrediction p;
        p.sequence_id = s.id;
        p.truth = s.labels;
        for (const AuDetector& det : bundle.detectors) {
            const Vector feature = arm_feature(det.model, s, det.upper_region);
            if (decision(det.svm, feature) > 0) p.predicted.insert(det.au);
        }
        predictions.push_back(std::move(p));
    }
    if (predictions.empty())
        throw std::invalid_argument(std::string("eval_pipeline: empty ") +
                                    (on_train_split ? "train" : "test") + " split");
    return evaluate(predictions);
}

void write_metrics_report(const std::string& out_dir, const Metrics& metrics,
                          const std::string& echo) {
    ensure_dir(out_dir);
    json doc;
    doc["total"] = metrics.total;
    doc["exact_match"] = metrics.exact_match;
    doc["partial"] = metrics.partial;
    doc["disjoint"] = metrics.disjoint;
    doc["recognition_rate"] = metrics.recognition_rate;
    doc["false_alarm_rate"] = metrics.false_alarm_rate;
    doc["config_hash"] = fnv1a_hex(echo);
    json rows = json::array();
    for (const CombinationRow& row : metrics.rows) {
        json r;
        r["aus"] = row.combination;
        r["total"] = row.total;
        r["exact"] = row.exact;
        r["partial"] = row.partial;
        r["disjoint"] = row.disjoint;
        r["extras"] = row.extras;
        rows.push_back(r);
    }
    doc["rows"] = rows;
    write_text_file(out_dir + "/metrics.json", doc.dump(2) + "\n");
    write_text_file(out_dir + "/table.txt", render_metrics_text(metrics));
}

std::vector<CompareRow> compare(const PreparedDataset& dataset, const PipelineConfig& config) {
    std::vector<CompareRow> rows;
    for (Method method : all_methods()) {
        ModelBundle bundle = train_pipeline(dataset, method, config);
        rows.push_back({method_name(method), eval_pipeline(bundle, dataset)});
    }
    return rows;
}

void write_compare_report(const std::string& out_dir, const std::vector<CompareRow>& rows) {
    ensure_dir(out_dir);
    std::ostringstream csv;
    csv << "method,recognition_rate,false_alarm_rate\n";
    csv << std::fixed << std::setprecision(6);
    for (const CompareRow& row : rows)
        csv << row.method << ',' << row.metrics.recognition_rate << ','
            << row.metrics.false_alarm_rate << '\n';
    write_text_file(out_dir + "/compare.csv", csv.str());

    std::ostringstream text;
    text << std::left << std::setw(16) << "method" << std::right << std::setw(8) << "R(%)"
         << std::setw(8) << "F(%)" << '\n';
    text << std::fixed << std::setprecision(1);
    for (const CompareRow& row : rows)
        text << std::left << std::setw(16) << row.method << std::right << std::setw(8)
             << 100.0 * row.metrics.recognition_rate << std::setw(8)
             << 100.0 * row.metrics.false_alarm_rate << '\n';
    write_text_file(out_dir + "/compare.txt", text.str());
}

}  // namespace mbda
