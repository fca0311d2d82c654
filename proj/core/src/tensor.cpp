#include "mbda/tensor.hpp"

#include <numeric>
#include <stdexcept>
#include <string>

namespace mbda {

namespace {

Index checked_size(const std::vector<Index>& dims) {
    if (dims.empty()) {
        throw std::invalid_argument("tensor must have order >= 1");
    }
    Index n = 1;
    for (Index d : dims) {
        if (d < 1) {
            throw std::invalid_argument("tensor extents must be >= 1");
        }
        n *= d;
    }
    return n;
}

void check_mode(const Tensor& z, int mode) {
    if (mode < 0 || mode >= z.order()) {
        throw std::invalid_argument("invalid mode index " + std::to_string(mode) +
                                    " for order-" + std::to_string(z.order()) + " tensor");
    }
}

// Stride of `mode` in the canonical layout (mode 0 varies fastest).
Index mode_stride(const std::vector<Index>& dims, int mode) {
    Index s = 1;
    for (int m = 0; m < mode; ++m) {
        s *= dims[static_cast<size_t>(m)];
    }
    return s;
}

}  // namespace

Tensor::Tensor(std::vector<Index> dims)
    : dims_(std::move(dims)), values_(Vector::Zero(checked_size(dims_))) {}

Tensor::Tensor(std::vector<Index> dims, Vector values) : dims_(std::move(dims)) {
    if (checked_size(dims_) != values.size()) {
        throw std::invalid_argument("value count does not match tensor extents");
    }
    values_ = std::move(values);
}

Index Tensor::flat_index(std::span<const Index> idx) const {
    if (static_cast<int>(idx.size()) != order()) {
        throw std::invalid_argument("index arity does not match tensor order");
    }
    Index flat = 0;
    Index stride = 1;
    for (size_t m = 0; m < dims_.size(); ++m) {
        if (idx[m] < 0 || idx[m] >= dims_[m]) {
            throw std::out_of_range("tensor index out of range");
        }
        flat += idx[m] * stride;
        stride *= dims_[m];
    }
    return flat;
}

Matrix unfold(const Tensor& z, int mode) {
    check_mode(z, mode);
    const auto& dims = z.dims();
    const Index d = dims[static_cast<size_t>(mode)];
    const Index stride = mode_stride(dims, mode);
    const Index cols = z.size() / d;

    // Canonical flat index n decomposes as n = low + stride*(r + d*high)
    // with low enumerating modes below `mode` and high the modes above it.
    // The unfolding column is low + stride*high: modes below `mode` are the
    // lowest remaining ones, so they vary fastest, as required.
    Matrix out(d, cols);
    const double* src = z.values().data();
    const Index block = stride * d;
    for (Index n = 0; n < z.size(); ++n) {
        const Index low = n % stride;
        const Index r = (n / stride) % d;
        const Index high = n / block;
        out(r, low + stride * high) = src[n];
    }
    return out;
}

Tensor fold(const Matrix& m, int mode, const std::vector<Index>& dims) {
    const Index total = checked_size(dims);
    if (mode < 0 || mode >= static_cast<int>(dims.size())) {
        throw std::invalid_argument("invalid mode index for fold");
    }
    const Index d = dims[static_cast<size_t>(mode)];
    if (m.rows() != d || m.cols() != total / d) {
        throw std::invalid_argument("matrix shape does not match fold extents");
    }
    const Index stride = mode_stride(dims, mode);

    Tensor out(dims);
    double* dst = out.values().data();
    for (Index k = 0; k < m.cols(); ++k) {
        const Index low = k % stride;
        const Index high = k / stride;
        const Index base = low + stride * d * high;
        for (Index r = 0; r < d; ++r) {
            dst[base + stride * r] = m(r, k);
        }
    }
    return out;
}

Tensor mode_product(const Tensor& z, const Matrix& w, int mode) {
    check_mode(z, mode);
    if (w.cols() != z.dim(mode)) {
        throw std::invalid_argument("mode product: matrix columns must equal the mode extent");
    }
    std::vector<Index> new_dims = z.dims();
    new_dims[static_cast<size_t>(mode)] = w.rows();
    return fold(w * unfold(z, mode), mode, new_dims);
}

double sq_distance(const Tensor& a, const Tensor& b) {
    if (!a.same_dims(b)) {
        throw std::invalid_argument("sq_distance requires identical dims");
    }
    return (a.values() - b.values()).squaredNorm();
}

Tensor mean_tensor(const std::vector<Tensor>& samples) {
    if (samples.empty()) {
        throw std::invalid_argument("mean_tensor requires at least one sample");
    }
    Tensor acc(samples.front().dims());
    for (const Tensor& t : samples) {
        if (!t.same_dims(samples.front())) {
            throw std::invalid_argument("mean_tensor requires identical dims");
        }
        acc.values() += t.values();
    }
    acc.values() /= static_cast<double>(samples.size());
    return acc;
}

Tensor matrix_as_tensor(const Matrix& m) {
    // Eigen matrices are column-major, matching the canonical layout.
    Vector v = Eigen::Map<const Vector>(m.data(), m.size());
    return Tensor({m.rows(), m.cols()}, std::move(v));
}

Vector vectorize(const Tensor& z) {
    return z.values();
}

}  // namespace mbda
