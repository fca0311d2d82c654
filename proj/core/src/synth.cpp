#include "mbda/synth.hpp"

#include "mbda/io.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <set>
#include <stdexcept>

namespace mbda {

double Rng::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * M_PI * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
}

void grid_point_position(int id, Index rows, Index cols, double* row, double* col) {
    const int r = (id - 1) / kGridCols + 1;
    const int c = (id - 1) % kGridCols + 1;
    *row = (r - 0.5) * static_cast<double>(rows) / kGridRows;
    *col = (c - 0.5) * static_cast<double>(cols) / kGridCols;
}

SynthSpec default_synth_spec() {
    SynthSpec spec;
    // Upper band (landmark rows 1-3 span y in [0, 9.6]); AU 7 sits to the
    // right of the landmark window, so its evidence is appearance-only.
    spec.aus = {
        {1, 4.8, 9.3, 5.0, 0.45, 3.0},
        {2, 4.8, 18.7, 5.0, 0.45, 3.0},
        {4, 1.6, 28.0, 5.0, 0.45, 3.0},
        {5, 8.0, 28.0, 4.0, 0.40, 2.5},
        {6, 4.8, 37.3, 5.0, 0.45, 3.0},
        {7, 8.0, 48.0, 4.0, 0.50, 2.5},
        // Lower band (landmark rows 6-8). AU 15's radius covers at most one
        // grid point and AU 26 sits outside the landmark window: both are
        // geometrically weak on purpose.
        {9, 20.8, 9.3, 5.0, 0.45, 3.0},
        {12, 20.8, 18.7, 5.0, 0.45, 3.0},
        {15, 24.0, 28.0, 2.5, 0.55, 1.0},
        {17, 17.6, 28.0, 5.0, 0.45, 3.0},
        {25, 20.8, 37.3, 5.0, 0.45, 3.0},
        {26, 24.0, 48.0, 4.0, 0.50, 2.5},
    };
    spec.combinations = {{1},      {2},      {4},      {5},      {6},      {7},
                         {9},      {12},     {15},     {17},     {25},     {26},
                         {1, 2},   {4, 5},   {6, 7},   {9, 17},  {12, 25}, {25, 26}};
    return spec;
}

SynthSpec synth_spec_from(const ConfigMap& config) {
    SynthSpec spec = default_synth_spec();
    spec.image_rows = config.get_int("synth_image_rows", static_cast<int>(spec.image_rows));
    spec.image_cols = config.get_int("synth_image_cols", static_cast<int>(spec.image_cols));
    spec.subjects = config.get_int("synth_subjects", spec.subjects);
    spec.test_subjects = config.get_int("synth_test_subjects", spec.test_subjects);
    spec.sequences_per_combination =
        config.get_int("synth_sequences_per_combination", spec.sequences_per_combination);
    spec.frame_count = config.get_int("synth_frames", spec.frame_count);
    spec.noise_level = config.get_double("synth_noise", spec.noise_level);
    spec.track_jitter = config.get_double("synth_track_jitter", spec.track_jitter);
    spec.amplitude_scale = config.get_double("synth_amplitude_scale", spec.amplitude_scale);
    spec.seed = static_cast<std::uint64_t>(config.get_int("synth_seed", static_cast<int>(spec.seed)));
    return spec;
}

namespace {

void check_spec(const SynthSpec& spec) {
    if (spec.image_rows < 8 || spec.image_cols < 8)
        throw std::invalid_argument("synth: image must be at least 8x8");
    if (spec.subjects < 2 || spec.test_subjects < 1 || spec.test_subjects >= spec.subjects)
        throw std::invalid_argument("synth: need at least one train and one test subject");
    if (spec.sequences_per_combination < 1)
        throw std::invalid_argument("synth: sequences_per_combination must be positive");
    if (spec.frame_count < 2) throw std::invalid_argument("synth: need at least 2 frames");
    if (spec.noise_level < 0 || spec.track_jitter < 0 || spec.amplitude_scale < 0)
        throw std::invalid_argument("synth: noise, jitter, and amplitude scale must be >= 0");
    if (spec.aus.empty() || spec.combinations.empty())
        throw std::invalid_argument("synth: AU vocabulary and combinations must be nonempty");
    std::set<int> vocab;
    for (const SynthAu& au : spec.aus) {
        if (au.id <= 0 || !vocab.insert(au.id).second)
            throw std::invalid_argument("synth: AU ids must be positive and unique");
        if (au.radius <= 0 || au.amplitude < 0 || au.track_scale < 0)
            throw std::invalid_argument("synth: bad AU geometry");
    }
    for (const auto& combo : spec.combinations) {
        if (combo.empty()) throw std::invalid_argument("synth: empty AU combination");
        for (int id : combo)
            if (!vocab.count(id))
                throw std::invalid_argument("synth: combination uses unknown AU " +
                                            std::to_string(id));
    }
}

Matrix subject_texture(Index rows, Index cols, Rng& rng) {
    struct Blob {
        double row, col, sigma, amp;
    };
    std::vector<Blob> blobs(6);
    for (Blob& b : blobs) {
        b.row = rng.uniform() * static_cast<double>(rows);
        b.col = rng.uniform() * static_cast<double>(cols);
        b.sigma = rng.uniform(3.0, 9.0);
        b.amp = rng.uniform(-0.10, 0.10);
    }
    Matrix base(rows, cols);
    for (Index r = 0; r < rows; ++r) {
        for (Index c = 0; c < cols; ++c) {
            double v = 0.5;
            for (const Blob& b : blobs) {
                const double dr = static_cast<double>(r) - b.row;
                const double dc = static_cast<double>(c) - b.col;
                v += b.amp * std::exp(-(dr * dr + dc * dc) / (2.0 * b.sigma * b.sigma));
            }
            base(r, c) = std::clamp(v, 0.0, 1.0);
        }
    }
    return base;
}

}  // namespace

Manifest synth_dataset(const SynthSpec& spec, const std::string& root) {
    check_spec(spec);
    std::error_code ec;
    std::filesystem::create_directories(root, ec);
    if (ec) throw std::runtime_error("synth: cannot create " + root + ": " + ec.message());

    std::map<int, const SynthAu*> au_of;
    Manifest manifest;
    manifest.image_rows = spec.image_rows;
    manifest.image_cols = spec.image_cols;
    manifest.frame_count = spec.frame_count;
    for (const SynthAu& au : spec.aus) {
        au_of[au.id] = &au;
        manifest.au_vocabulary.push_back(au.id);
    }
    std::sort(manifest.au_vocabulary.begin(), manifest.au_vocabulary.end());

    // Draw order is fixed: subject textures first, then per sequence (in
    // manifest order) the pixel noise frame by frame, then the track jitter.
    Rng rng(spec.seed);
    std::vector<Matrix> textures;
    textures.reserve(static_cast<std::size_t>(spec.subjects));
    for (int s = 0; s < spec.subjects; ++s)
        textures.push_back(subject_texture(spec.image_rows, spec.image_cols, rng));

    std::vector<double> grid_row(kGridPointCount), grid_col(kGridPointCount);
    for (int id = 1; id <= kGridPointCount; ++id)
        grid_point_position(id, spec.image_rows, spec.image_cols, &grid_row[id - 1],
                            &grid_col[id - 1]);

    int sequence_no = 0;
    for (std::size_t ci = 0; ci < spec.combinations.size(); ++ci) {
        std::vector<int> labels = spec.combinations[ci];
        std::sort(labels.begin(), labels.end());
        for (int k = 0; k < spec.sequences_per_combination; ++k) {
            ++sequence_no;
            const int subject = (static_cast<int>(ci) + k) % spec.subjects;
            char id[16];
            std::snprintf(id, sizeof(id), "seq%04d", sequence_no);

            ManifestEntry entry;
            entry.id = id;
            entry.subject = subject;
            entry.split = subject >= spec.subjects - spec.test_subjects ? "test" : "train";
            entry.labels = labels;
            manifest.entries.push_back(entry);

            const std::string dir = sequence_dir(root, entry.id);
            std::filesystem::create_directories(dir, ec);
            if (ec) throw std::runtime_error("synth: cannot create " + dir + ": " + ec.message());

            const Matrix& base = textures[static_cast<std::size_t>(subject)];
            for (int f = 0; f < spec.frame_count; ++f) {
                const double ramp = static_cast<double>(f) / (spec.frame_count - 1);
                Matrix frame = base;
                for (int label : labels) {
                    const SynthAu& au = *au_of.at(label);
                    const double sigma = au.radius / 2.0;
                    const double peak = spec.amplitude_scale * au.amplitude * ramp;
                    if (peak == 0.0) continue;
                    for (Index r = 0; r < frame.rows(); ++r) {
                        for (Index c = 0; c < frame.cols(); ++c) {
                            const double dr = static_cast<double>(r) - au.center_row;
                            const double dc = static_cast<double>(c) - au.center_col;
                            frame(r, c) +=
                                peak * std::exp(-(dr * dr + dc * dc) / (2.0 * sigma * sigma));
                        }
                    }
                }
                if (spec.noise_level > 0) {
                    for (Index r = 0; r < frame.rows(); ++r)
                        for (Index c = 0; c < frame.cols(); ++c)
                            frame(r, c) += spec.noise_level * rng.normal();
                }
                save_pgm(frame_path(root, entry.id, f + 1), frame);
            }

            LandmarkTrack track;
            for (int pid = 1; pid <= kGridPointCount; ++pid) track.point_ids.push_back(pid);
            for (int f = 0; f < spec.frame_count; ++f) {
                const double ramp = static_cast<double>(f) / (spec.frame_count - 1);
                Matrix pts(kGridPointCount, 2);
                for (int p = 0; p < kGridPointCount; ++p) {
                    double x = grid_col[p];
                    double y = grid_row[p];
                    for (int label : labels) {
                        const SynthAu& au = *au_of.at(label);
                        const double dx = grid_col[p] - au.center_col;
                        const double dy = grid_row[p] - au.center_row;
                        const double dist = std::sqrt(dx * dx + dy * dy);
                        if (dist > au.radius || dist < 1e-9) continue;
                        const double push = spec.amplitude_scale * au.track_scale * ramp / dist;
                        x += push * dx;
                        y += push * dy;
                    }
                    if (spec.track_jitter > 0) {
                        x += spec.track_jitter * rng.normal();
                        y += spec.track_jitter * rng.normal();
                    }
                    pts(p, 0) = x;
                    pts(p, 1) = y;
                }
                track.frames.push_back(std::move(pts));
            }
            save_track(dir + "/track.csv", track);
        }
    }

    save_manifest(root + "/manifest.json", manifest);
    return manifest;
}

}  // namespace mbda
