#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mbda/io.hpp"
#include "mbda/pipeline.hpp"
#include "mbda/synth.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

using namespace mbda;
namespace fs = std::filesystem;

namespace {

std::string temp_dir(const std::string& name) {
    fs::path p = fs::temp_directory_path() / name;
    fs::remove_all(p);
    return p.string();
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

/// Sorted (relative path, bytes) listing of every regular file under root.
std::vector<std::pair<std::string, std::string>> tree_bytes(const std::string& root) {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& entry : fs::recursive_directory_iterator(root)) {
        if (!entry.is_regular_file()) continue;
        out.emplace_back(fs::relative(entry.path(), root).string(), slurp(entry.path()));
    }
    std::sort(out.begin(), out.end());
    return out;
}

/// Two well-separated bumps on a 16x24 image, one per landmark band.
SynthSpec tiny_spec() {
    SynthSpec spec = default_synth_spec();
    spec.image_rows = 16;
    spec.image_cols = 24;
    spec.subjects = 3;
    spec.test_subjects = 1;
    spec.sequences_per_combination = 4;
    spec.frame_count = 4;
    spec.aus = {{1, 2.4, 8.0, 3.0, 0.5, 2.0}, {2, 10.4, 14.0, 3.0, 0.5, 2.0}};
    spec.combinations = {{1}, {2}, {1, 2}};
    return spec;
}

PipelineConfig tiny_config() {
    PipelineConfig c;
    c.t_target = 3;
    c.gabor_scales = 1;
    c.bda_rank = 4;
    c.bda_preselect = 0;
    c.mbda_max_iterations = 3;
    c.upper_aus = {1};
    return c;
}

std::vector<const PreparedSample*> train_ptrs(const PreparedDataset& ds) {
    std::vector<const PreparedSample*> out;
    for (const PreparedSample& s : ds.samples)
        if (!s.test_split) out.push_back(&s);
    return out;
}

/// Random order-4 tensors split into two labeled classes, no landmarks.
std::vector<PreparedSample> random_samples(const std::vector<Index>& dims, int per_class,
                                           unsigned seed, double scale = 1.0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-scale, scale);
    std::vector<PreparedSample> out;
    for (int i = 0; i < 2 * per_class; ++i) {
        PreparedSample s;
        s.id = "s" + std::to_string(i);
        if (i < per_class) s.labels = {1};
        s.appearance = Tensor(dims);
        for (Index n = 0; n < s.appearance.size(); ++n) s.appearance[n] = u(rng);
        out.push_back(std::move(s));
    }
    return out;
}

std::vector<const PreparedSample*> ptrs(const std::vector<PreparedSample>& samples) {
    std::vector<const PreparedSample*> out;
    for (const PreparedSample& s : samples) out.push_back(&s);
    return out;
}

}  // namespace

TEST_CASE("same seed writes byte-identical datasets") {
    SynthSpec spec = tiny_spec();
    const std::string a = temp_dir("mbda_synth_a");
    const std::string b = temp_dir("mbda_synth_b");
    synth_dataset(spec, a);
    synth_dataset(spec, b);
    auto ta = tree_bytes(a), tb = tree_bytes(b);
    REQUIRE(ta.size() == tb.size());
    CHECK(ta == tb);

    spec.seed = 2;
    const std::string c = temp_dir("mbda_synth_c");
    synth_dataset(spec, c);
    CHECK(tree_bytes(c) != ta);
    fs::remove_all(a);
    fs::remove_all(b);
    fs::remove_all(c);
}

TEST_CASE("zero amplitude and zero noise freeze the sequence") {
    SynthSpec spec = tiny_spec();
    spec.amplitude_scale = 0.0;
    spec.noise_level = 0.0;
    spec.track_jitter = 0.0;
    const std::string root = temp_dir("mbda_synth_flat");
    Manifest manifest = synth_dataset(spec, root);

    const std::string first = slurp(frame_path(root, manifest.entries[0].id, 1));
    for (int f = 2; f <= spec.frame_count; ++f)
        CHECK(slurp(frame_path(root, manifest.entries[0].id, f)) == first);

    PipelineConfig config = tiny_config();
    GaborBank bank = bank_from(config);
    SequenceSample sample = load_sample(root, manifest.entries[0], manifest.frame_count);
    PreparedSample prepared = prepare_sample(sample, bank, config, true);
    REQUIRE(prepared.appearance.order() == 4);
    for (Index n = 0; n < prepared.appearance.size(); ++n)
        CHECK(prepared.appearance[n] == 0.0);
    CHECK(prepared.disp_upper.cwiseAbs().maxCoeff() == 0.0);
    fs::remove_all(root);
}

TEST_CASE("each bump brightens its own image region") {
    SynthSpec spec = tiny_spec();
    spec.noise_level = 0.0;
    spec.track_jitter = 0.0;
    spec.combinations = {{1}, {2}};
    spec.sequences_per_combination = 3;
    const std::string root = temp_dir("mbda_synth_bump");
    Manifest manifest = synth_dataset(spec, root);

    for (const ManifestEntry& entry : manifest.entries) {
        Matrix first = load_pgm(frame_path(root, entry.id, 1));
        Matrix last = load_pgm(frame_path(root, entry.id, spec.frame_count));
        Matrix delta = (last - first).cwiseAbs();
        Index r = 0, c = 0;
        delta.maxCoeff(&r, &c);
        const SynthAu& au = spec.aus[static_cast<std::size_t>(entry.labels[0] - 1)];
        const double dr = static_cast<double>(r) - au.center_row;
        const double dc = static_cast<double>(c) - au.center_col;
        CHECK(std::sqrt(dr * dr + dc * dc) <= 1.5);  // peak sits at the bump center
        CHECK(delta(r, c) > 0.2);
    }
    fs::remove_all(root);
}

TEST_CASE("feature lengths follow the configured target dims") {
    const std::string root = temp_dir("mbda_pipe_dims");
    synth_dataset(tiny_spec(), root);
    PipelineConfig config = tiny_config();
    PreparedDataset ds = prepare_dataset(root, config, true);
    auto train = train_ptrs(ds);

    BuiltFeatures mbda = build_mbda_features(train, 1, config);
    REQUIRE(!mbda.features.empty());
    CHECK(mbda.features[0].size() == 3 * 4 * 1 * 1 + 4 * 2);  // appearance + landmarks
    CHECK(mbda.model.appearance.order() == 4);

    PipelineConfig app_only = config;
    app_only.use_geometric = false;
    BuiltFeatures bare = build_mbda_features(train, 1, app_only);
    CHECK(bare.features[0].size() == 12);
    CHECK(bare.model.geometric.order() == 0);

    BuiltFeatures geo = build_arm_features(train, 1, Method::kGeometricOnly, config);
    CHECK(geo.features[0].size() == 8);
    CHECK(geo.model.appearance.order() == 0);
    CHECK(geo.model.slices.empty());
    fs::remove_all(root);
}

TEST_CASE("slice arm fits one map per kernel-frame pair") {
    // 16 kernels x 4 difference frames -> 64 independent slice maps; with
    // 2x2 targets and no preselection the vector stage sees 64 * 4 = 256
    // coordinates.
    auto samples = random_samples({5, 6, 16, 4}, 6, 11);
    PipelineConfig config = tiny_config();
    config.use_geometric = false;
    BuiltFeatures built = build_2dbda_bda_features(ptrs(samples), 1, config);
    CHECK(built.model.slices.size() == 64);
    CHECK(built.model.selection.size() == 256);
    CHECK(built.model.bda.rows() == 256);
    CHECK(built.model.bda.cols() == 4);
    CHECK(built.features[0].size() == 4);
}

TEST_CASE("variance preselection keeps the loudest slice") {
    // Slice (kernel 1, frame 0) of a {4,5,2,2} tensor carries all the
    // variance; its four projected coordinates occupy positions 8..11.
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> loud(-3.0, 3.0);
    std::uniform_real_distribution<double> quiet(-1e-3, 1e-3);
    std::vector<PreparedSample> samples;
    for (int i = 0; i < 10; ++i) {
        PreparedSample s;
        s.id = "s" + std::to_string(i);
        if (i < 5) s.labels = {1};
        s.appearance = Tensor({4, 5, 2, 2});
        for (Index n = 0; n < s.appearance.size(); ++n) s.appearance[n] = quiet(rng);
        for (Index r = 0; r < 4; ++r)
            for (Index c = 0; c < 5; ++c) s.appearance.at({r, c, 1, 0}) = loud(rng);
        samples.push_back(std::move(s));
    }
    PipelineConfig config = tiny_config();
    config.use_geometric = false;
    config.bda_preselect = 4;
    config.bda_rank = 2;
    BuiltFeatures built = build_2dbda_bda_features(ptrs(samples), 1, config);
    REQUIRE(built.model.selection.size() == 4);
    const Index slice_index = 1 * 2 + 0;  // kernel-major slice order
    for (Index idx : built.model.selection) {
        CHECK(idx >= slice_index * 4);
        CHECK(idx < (slice_index + 1) * 4);
    }
    CHECK(built.model.bda.rows() == 4);
    CHECK(built.features[0].size() == 2);
}

TEST_CASE("appearance features are linear in the input tensor") {
    auto samples = random_samples({6, 7, 3, 2}, 5, 31);
    PipelineConfig config = tiny_config();
    config.use_geometric = false;
    config.appearance_dims = {2, 3, 1, 1};
    BuiltFeatures built = build_mbda_features(ptrs(samples), 1, config);

    std::vector<Tensor> tensors;
    for (const PreparedSample& s : samples) tensors.push_back(s.appearance);
    PreparedSample mean_sample;
    mean_sample.appearance = mean_tensor(tensors);
    Vector at_mean = arm_feature(built.model, mean_sample, true);

    Vector mean_of_features = Vector::Zero(built.features[0].size());
    for (const Vector& f : built.features) mean_of_features += f;
    mean_of_features /= static_cast<double>(built.features.size());
    CHECK((at_mean - mean_of_features).cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("training skips vocabulary entries without examples") {
    SynthSpec spec = tiny_spec();
    spec.aus.push_back({3, 13.0, 20.0, 2.0, 0.4, 1.0});  // never used by a combination
    const std::string root = temp_dir("mbda_pipe_skip");
    synth_dataset(spec, root);
    PipelineConfig config = tiny_config();
    PreparedDataset ds = prepare_dataset(root, config, false);
    ModelBundle bundle = train_pipeline(ds, Method::kGeometricOnly, config);
    CHECK(bundle.vocabulary == std::vector<int>{1, 2, 3});
    CHECK(bundle.detectors.size() == 2);
    REQUIRE(bundle.warnings.size() == 1);
    CHECK(bundle.warnings[0].find("3") != std::string::npos);
    fs::remove_all(root);
}

TEST_CASE("bundles reload with bit-identical decisions") {
    const std::string root = temp_dir("mbda_pipe_bundle");
    synth_dataset(tiny_spec(), root);
    PipelineConfig config = tiny_config();
    PreparedDataset ds = prepare_dataset(root, config, true);
    ModelBundle bundle = train_pipeline(ds, Method::kMbda, config);
    REQUIRE(bundle.detectors.size() == 2);
    CHECK(bundle.method == "mbda");
    CHECK(bundle.config_echo == config_echo(config));

    const std::string path = temp_dir("mbda_pipe_bundle_file") + ".bin";
    fs::create_directories(fs::path(path).parent_path());
    save_bundle(path, bundle);
    ModelBundle back = load_bundle(path);
    CHECK(back.method == bundle.method);
    CHECK(back.vocabulary == bundle.vocabulary);
    CHECK(back.config_echo == bundle.config_echo);
    REQUIRE(back.detectors.size() == bundle.detectors.size());
    for (const PreparedSample& s : ds.samples) {
        if (!s.test_split) continue;
        for (std::size_t d = 0; d < bundle.detectors.size(); ++d) {
            const Vector f1 = arm_feature(bundle.detectors[d].model, s,
                                          bundle.detectors[d].upper_region);
            const Vector f2 =
                arm_feature(back.detectors[d].model, s, back.detectors[d].upper_region);
            CHECK(decision(bundle.detectors[d].svm, f1) == decision(back.detectors[d].svm, f2));
        }
    }

    std::string text = inspect_bundle(back);
    CHECK(text.find("mbda") != std::string::npos);
    CHECK(text.find("AU 1") != std::string::npos);
    std::remove(path.c_str());
    fs::remove_all(root);
}

TEST_CASE("the training split evaluates near-perfectly") {
    const std::string root = temp_dir("mbda_pipe_eval");
    synth_dataset(tiny_spec(), root);
    PipelineConfig config = tiny_config();
    PreparedDataset ds = prepare_dataset(root, config, true);
    ModelBundle bundle = train_pipeline(ds, Method::kMbda, config);

    Metrics on_train = eval_pipeline(bundle, ds, true);
    CHECK(on_train.total == 8);
    CHECK(on_train.recognition_rate >= 0.9);

    Metrics on_test = eval_pipeline(bundle, ds, false);
    CHECK(on_test.total == 4);
    CHECK(on_test.recognition_rate >= 0.0);
    CHECK(on_test.recognition_rate <= 1.0);
    fs::remove_all(root);
}

TEST_CASE("evaluation rejects empty splits and unknown labels") {
    ModelBundle bundle;
    bundle.vocabulary = {1, 2};
    PreparedDataset train_only;
    PreparedSample s;
    s.id = "a";
    s.labels = {1};
    train_only.samples.push_back(s);
    CHECK_THROWS(eval_pipeline(bundle, train_only, false));

    PreparedDataset foreign;
    s.test_split = true;
    s.labels = {4};
    foreign.samples.push_back(s);
    CHECK_THROWS(eval_pipeline(bundle, foreign, false));
}

TEST_CASE("compare runs all four arms deterministically") {
    const std::string root = temp_dir("mbda_pipe_cmp");
    synth_dataset(tiny_spec(), root);
    PipelineConfig config = tiny_config();
    PreparedDataset ds = prepare_dataset(root, config, true);

    std::vector<CompareRow> rows = compare(ds, config);
    REQUIRE(rows.size() == 4);
    std::vector<std::string> names;
    for (const CompareRow& row : rows) {
        names.push_back(row.method);
        CHECK(row.metrics.recognition_rate >= 0.0);
        CHECK(row.metrics.recognition_rate <= 1.0);
        CHECK(row.metrics.false_alarm_rate >= 0.0);
        CHECK(row.metrics.false_alarm_rate <= 1.0);
        CHECK(row.metrics.total == 4);
    }
    CHECK(names == std::vector<std::string>{"mbda", "twodbda_bda", "mda", "geometric_only"});

    const std::string out1 = temp_dir("mbda_pipe_cmp_out1");
    const std::string out2 = temp_dir("mbda_pipe_cmp_out2");
    write_compare_report(out1, rows);
    write_compare_report(out2, compare(ds, config));
    const std::string csv = slurp(fs::path(out1) / "compare.csv");
    CHECK(csv == slurp(fs::path(out2) / "compare.csv"));
    CHECK(csv.rfind("method,recognition_rate,false_alarm_rate\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);
    fs::remove_all(root);
    fs::remove_all(out1);
    fs::remove_all(out2);
}

TEST_CASE("metric reports carry a config hash instead of timestamps") {
    Metrics m;
    m.total = 4;
    m.exact_match = 3;
    m.partial = 1;
    m.recognition_rate = 0.75;
    m.false_alarm_rate = 0.25;
    CombinationRow row;
    row.combination = {1, 2};
    row.total = 4;
    row.exact = 3;
    row.partial = 1;
    row.extras = 1;
    m.rows.push_back(row);

    const std::string out = temp_dir("mbda_pipe_report");
    write_metrics_report(out, m, "alpha = 1\n");
    const std::string json = slurp(fs::path(out) / "metrics.json");
    CHECK(json.find("recognition_rate") != std::string::npos);
    CHECK(json.find("config_hash") != std::string::npos);
    CHECK(json.find("time") == std::string::npos);
    const std::string table = slurp(fs::path(out) / "table.txt");
    CHECK(table.find("1+2") != std::string::npos);

    // Same config text, same hash; different text, different hash.
    const std::string out2 = temp_dir("mbda_pipe_report2");
    write_metrics_report(out2, m, "alpha = 1\n");
    CHECK(slurp(fs::path(out2) / "metrics.json") == json);
    const std::string out3 = temp_dir("mbda_pipe_report3");
    write_metrics_report(out3, m, "alpha = 2\n");
    CHECK(slurp(fs::path(out3) / "metrics.json") != json);
    fs::remove_all(out);
    fs::remove_all(out2);
    fs::remove_all(out3);
}

TEST_CASE("the config echo is a parse fixed point") {
    PipelineConfig config;  // stock settings
    const std::string echo = config_echo(config);
    CHECK(echo.find("t_target = 5") != std::string::npos);
    CHECK(echo.find("mbda_sqrt_weighting = true") != std::string::npos);
    PipelineConfig back = pipeline_config_from(parse_config_text(echo));
    CHECK(config_echo(back) == echo);
}

TEST_CASE("scalar overrides reach the generator") {
    ConfigMap map = parse_config_text(
        "synth_subjects = 4\n"
        "synth_test_subjects = 2\n"
        "synth_noise = 0.05\n"
        "synth_seed = 9\n"
        "synth_frames = 6\n");
    SynthSpec spec = synth_spec_from(map);
    CHECK(spec.subjects == 4);
    CHECK(spec.test_subjects == 2);
    CHECK(spec.noise_level == 0.05);
    CHECK(spec.seed == 9);
    CHECK(spec.frame_count == 6);
    CHECK(spec.image_rows == 32);  // untouched defaults survive
}

TEST_CASE("a pure-noise dataset trains and evaluates without error") {
    SynthSpec spec = tiny_spec();
    spec.amplitude_scale = 0.0;  // classes differ only by noise
    const std::string root = temp_dir("mbda_pipe_noise");
    synth_dataset(spec, root);
    PipelineConfig config = tiny_config();
    PreparedDataset ds = prepare_dataset(root, config, false);
    ModelBundle bundle = train_pipeline(ds, Method::kGeometricOnly, config);
    Metrics m = eval_pipeline(bundle, ds, false);
    CHECK(m.total == 4);
    fs::remove_all(root);
}
