#pragma once

#include "mbda/tensor.hpp"

#include <vector>

namespace mbda {

/// One complex Gabor kernel on a square support, DC-corrected so that a
/// constant image produces no response. The envelope is normalized to unit
/// mass, keeping response magnitudes comparable across scales.
struct GaborKernel {
    double orientation = 0.0;  // radians
    double wavelength = 0.0;   // pixels
    double sigma = 0.0;        // envelope std dev, pixels
    Matrix real;
    Matrix imag;
};

struct GaborBank {
    std::vector<GaborKernel> kernels;

    int count() const { return static_cast<int>(kernels.size()); }
};

/// Ordered grayscale frames of equal size, intensities in [0,1]. Frame 0 is
/// the neutral face, the last frame the expression apex.
struct ImageSequence {
    std::vector<Matrix> frames;

    int frame_count() const { return static_cast<int>(frames.size()); }
};

inline constexpr int kDefaultOrientations = 4;
inline constexpr int kDefaultScales = 4;
inline constexpr double kDefaultBaseWavelength = 4.0;

/// Builds orientations x scales kernels. Orientations are o*pi/orientations;
/// wavelengths grow by sqrt(2) per scale from base_wavelength; sigma is
/// 0.56 * wavelength and the support is truncated at 3 sigma. Kernel order:
/// all orientations of scale 0, then scale 1, ...
GaborBank make_bank(int orientations = kDefaultOrientations,
                    int scales = kDefaultScales,
                    double base_wavelength = kDefaultBaseWavelength);

/// Per-kernel complex filtering magnitude, one map per kernel, same size as
/// the image. Borders are handled by clamping coordinates to the image edge
/// (so constant images give exactly zero response everywhere). Throws if any
/// kernel is larger than the image.
std::vector<Matrix> response(const Matrix& image, const GaborBank& bank);

/// Frame indices (0-based) selected when resampling `source_frames` frames
/// down/up to t_target: first and last kept, interior indices at
/// round(k*(T-1)/(t_target-1)). Duplicates occur when the source is short.
std::vector<Index> resample_indices(Index source_frames, int t_target);

/// Keeps the first and last frames and evenly spaced interior frames.
ImageSequence resample_frames(const ImageSequence& seq, int t_target);

/// Block-average downsampling by an integer factor; output dims are
/// ceil(dim/factor) and partial edge blocks average the pixels they cover.
Matrix block_average(const Matrix& image, int factor);

/// Appearance tensor: resample to t_target frames, filter every frame with
/// the bank, subtract the first frame's magnitude stack from the rest, and
/// stack the differences into an order-4 tensor rows x cols x kernel x
/// (t_target - 1). Downsampling (if any) happens after differencing.
Tensor difference_tensor(const ImageSequence& seq, const GaborBank& bank,
                         int t_target, int downsample = 1);

}  // namespace mbda
