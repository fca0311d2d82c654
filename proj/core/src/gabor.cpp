#include "mbda/gabor.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace mbda {

namespace {

GaborKernel make_kernel(double orientation, double wavelength) {
    GaborKernel k;
    k.orientation = orientation;
    k.wavelength = wavelength;
    k.sigma = 0.56 * wavelength;

    const Index radius = static_cast<Index>(std::ceil(3.0 * k.sigma));
    const Index size = 2 * radius + 1;
    k.real.resize(size, size);
    k.imag.resize(size, size);

    const double cos_t = std::cos(orientation);
    const double sin_t = std::sin(orientation);
    const double inv_two_sigma_sq = 1.0 / (2.0 * k.sigma * k.sigma);
    const double omega = 2.0 * std::numbers::pi / wavelength;

    // First pass: envelope and raw carrier, plus the envelope-weighted
    // carrier mean used for the DC correction.
    Matrix env(size, size);
    double env_sum = 0.0;
    double mean_re = 0.0;
    double mean_im = 0.0;
    for (Index r = 0; r < size; ++r) {
        for (Index c = 0; c < size; ++c) {
            const double y = static_cast<double>(r - radius);
            const double x = static_cast<double>(c - radius);
            const double xr = x * cos_t + y * sin_t;
            const double yr = -x * sin_t + y * cos_t;
            const double e = std::exp(-(xr * xr + yr * yr) * inv_two_sigma_sq);
            env(r, c) = e;
            env_sum += e;
            mean_re += e * std::cos(omega * xr);
            mean_im += e * std::sin(omega * xr);
        }
    }
    mean_re /= env_sum;
    mean_im /= env_sum;

    for (Index r = 0; r < size; ++r) {
        for (Index c = 0; c < size; ++c) {
            const double y = static_cast<double>(r - radius);
            const double x = static_cast<double>(c - radius);
            const double xr = x * cos_t + y * sin_t;
            const double e = env(r, c) / env_sum;
            k.real(r, c) = e * (std::cos(omega * xr) - mean_re);
            k.imag(r, c) = e * (std::sin(omega * xr) - mean_im);
        }
    }
    return k;
}

void check_sequence(const ImageSequence& seq, const char* who) {
    if (seq.frames.size() < 2) {
        throw std::invalid_argument(std::string(who) + ": sequence needs >= 2 frames");
    }
    const Index rows = seq.frames.front().rows();
    const Index cols = seq.frames.front().cols();
    if (rows == 0 || cols == 0) {
        throw std::invalid_argument(std::string(who) + ": empty frames");
    }
    for (const Matrix& f : seq.frames) {
        if (f.rows() != rows || f.cols() != cols) {
            throw std::invalid_argument(std::string(who) + ": frame sizes differ");
        }
    }
}

}  // namespace

GaborBank make_bank(int orientations, int scales, double base_wavelength) {
    if (orientations < 1 || scales < 1 || base_wavelength <= 0.0) {
        throw std::invalid_argument("make_bank: parameters must be positive");
    }
    GaborBank bank;
    bank.kernels.reserve(static_cast<size_t>(orientations) * static_cast<size_t>(scales));
    double wavelength = base_wavelength;
    for (int s = 0; s < scales; ++s) {
        for (int o = 0; o < orientations; ++o) {
            const double theta = std::numbers::pi * o / orientations;
            bank.kernels.push_back(make_kernel(theta, wavelength));
        }
        wavelength *= std::numbers::sqrt2;
    }
    return bank;
}

std::vector<Matrix> response(const Matrix& image, const GaborBank& bank) {
    const Index rows = image.rows();
    const Index cols = image.cols();
    if (rows == 0 || cols == 0) {
        throw std::invalid_argument("response: empty image");
    }
    std::vector<Matrix> maps;
    maps.reserve(bank.kernels.size());
    for (const GaborKernel& k : bank.kernels) {
        const Index size = k.real.rows();
        if (size > rows || size > cols) {
            throw std::invalid_argument(
                "response: kernel of size " + std::to_string(size) +
                " exceeds image " + std::to_string(rows) + "x" + std::to_string(cols));
        }
        const Index radius = (size - 1) / 2;
        Matrix out(rows, cols);
        for (Index r = 0; r < rows; ++r) {
            for (Index c = 0; c < cols; ++c) {
                double acc_re = 0.0;
                double acc_im = 0.0;
                for (Index a = 0; a < size; ++a) {
                    Index rr = r + a - radius;
                    rr = rr < 0 ? 0 : (rr >= rows ? rows - 1 : rr);
                    for (Index b = 0; b < size; ++b) {
                        Index cc = c + b - radius;
                        cc = cc < 0 ? 0 : (cc >= cols ? cols - 1 : cc);
                        const double px = image(rr, cc);
                        acc_re += px * k.real(a, b);
                        acc_im += px * k.imag(a, b);
                    }
                }
                out(r, c) = std::sqrt(acc_re * acc_re + acc_im * acc_im);
            }
        }
        maps.push_back(std::move(out));
    }
    return maps;
}

std::vector<Index> resample_indices(Index source_frames, int t_target) {
    if (source_frames < 2) {
        throw std::invalid_argument("resample_indices: need >= 2 source frames");
    }
    if (t_target < 2) {
        throw std::invalid_argument("resample_indices: t_target must be >= 2");
    }
    std::vector<Index> idx(static_cast<size_t>(t_target));
    for (int k = 0; k < t_target; ++k) {
        idx[static_cast<size_t>(k)] = static_cast<Index>(
            std::llround(static_cast<double>(k) * static_cast<double>(source_frames - 1) /
                         static_cast<double>(t_target - 1)));
    }
    return idx;
}

ImageSequence resample_frames(const ImageSequence& seq, int t_target) {
    check_sequence(seq, "resample_frames");
    ImageSequence out;
    for (Index i : resample_indices(seq.frame_count(), t_target)) {
        out.frames.push_back(seq.frames[static_cast<size_t>(i)]);
    }
    return out;
}

Matrix block_average(const Matrix& image, int factor) {
    if (factor < 1) {
        throw std::invalid_argument("block_average: factor must be >= 1");
    }
    if (factor == 1) {
        return image;
    }
    const Index out_rows = (image.rows() + factor - 1) / factor;
    const Index out_cols = (image.cols() + factor - 1) / factor;
    Matrix out(out_rows, out_cols);
    for (Index r = 0; r < out_rows; ++r) {
        const Index r0 = r * factor;
        const Index r1 = std::min<Index>(r0 + factor, image.rows());
        for (Index c = 0; c < out_cols; ++c) {
            const Index c0 = c * factor;
            const Index c1 = std::min<Index>(c0 + factor, image.cols());
            out(r, c) = image.block(r0, c0, r1 - r0, c1 - c0).mean();
        }
    }
    return out;
}

Tensor difference_tensor(const ImageSequence& seq, const GaborBank& bank,
                         int t_target, int downsample) {
    check_sequence(seq, "difference_tensor");
    if (bank.count() == 0) {
        throw std::invalid_argument("difference_tensor: empty bank");
    }
    const ImageSequence frames = resample_frames(seq, t_target);
    const std::vector<Matrix> base = response(frames.frames.front(), bank);

    const Index out_rows = (frames.frames.front().rows() + downsample - 1) / downsample;
    const Index out_cols = (frames.frames.front().cols() + downsample - 1) / downsample;
    const Index p = bank.count();
    const Index steps = t_target - 1;
    Tensor tensor({out_rows, out_cols, p, steps});

    for (Index f = 0; f < steps; ++f) {
        const std::vector<Matrix> maps =
            response(frames.frames[static_cast<size_t>(f + 1)], bank);
        for (Index k = 0; k < p; ++k) {
            const Matrix diff = maps[static_cast<size_t>(k)] - base[static_cast<size_t>(k)];
            const Matrix small = block_average(diff, downsample);
            for (Index c = 0; c < out_cols; ++c) {
                for (Index r = 0; r < out_rows; ++r) {
                    tensor.at({r, c, k, f}) = small(r, c);
                }
            }
        }
    }
    return tensor;
}

}  // namespace mbda
