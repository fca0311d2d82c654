#pragma once

#include "mbda/config.hpp"
#include "mbda/dataset.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace mbda {

/// Seeded RNG with explicit transforms so that generated datasets are
/// byte-identical across platforms and standard-library versions.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    /// Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Standard normal via Box-Muller.
    double normal();

private:
    std::mt19937_64 gen_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

/// One synthetic action unit: a Gaussian intensity bump at (center_row,
/// center_col) whose peak ramps to `amplitude`, displacing grid landmarks
/// within `radius` pixels radially outward by up to `track_scale` pixels.
struct SynthAu {
    int id = 0;
    double center_row = 0.0;
    double center_col = 0.0;
    double radius = 5.0;
    double amplitude = 0.45;
    double track_scale = 3.0;
};

struct SynthSpec {
    Index image_rows = 32;
    Index image_cols = 56;
    int subjects = 8;
    int test_subjects = 2;
    int sequences_per_combination = 12;
    int frame_count = 9;
    double noise_level = 0.02;     // per-pixel Gaussian noise per frame
    double track_jitter = 0.25;    // per-point landmark jitter, pixels
    double amplitude_scale = 1.0;  // master multiplier on AU amplitudes
    std::uint64_t seed = 1;
    std::vector<SynthAu> aus;
    std::vector<std::vector<int>> combinations;
};

/// The stock benchmark: 12 AUs split over an upper and a lower band, 18
/// label combinations, 8 subjects with the last 2 held out.
SynthSpec default_synth_spec();

/// Applies scalar overrides (synth_* keys) to the default spec.
SynthSpec synth_spec_from(const ConfigMap& config);

/// Pixel position of a 1-based grid landmark id on an image of this size.
void grid_point_position(int id, Index rows, Index cols, double* row, double* col);

/// Writes frames, tracks, and the manifest under root; returns the manifest.
Manifest synth_dataset(const SynthSpec& spec, const std::string& root);

}  // namespace mbda
