#pragma once

#include <Eigen/Dense>

#include <initializer_list>
#include <span>
#include <vector>

namespace mbda {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Dense real tensor of arbitrary order D >= 1.
///
/// Values live in one flat buffer in a fixed canonical layout: the mode-0
/// index varies fastest, the last mode slowest. All operations treat
/// tensors as immutable values; nothing here mutates shared state.
class Tensor {
public:
    Tensor() = default;

    /// Zero-initialized tensor with the given extents (all must be >= 1).
    explicit Tensor(std::vector<Index> dims);

    /// Wraps an existing value buffer; values.size() must equal the
    /// product of the extents.
    Tensor(std::vector<Index> dims, Vector values);

    int order() const { return static_cast<int>(dims_.size()); }
    const std::vector<Index>& dims() const { return dims_; }
    Index dim(int mode) const { return dims_[static_cast<size_t>(mode)]; }
    Index size() const { return values_.size(); }

    const Vector& values() const { return values_; }
    Vector& values() { return values_; }

    double operator[](Index flat) const { return values_[flat]; }
    double& operator[](Index flat) { return values_[flat]; }

    /// Element access by multi-index (one index per mode, 0-based).
    double at(std::span<const Index> idx) const { return values_[flat_index(idx)]; }
    double& at(std::span<const Index> idx) { return values_[flat_index(idx)]; }
    double at(std::initializer_list<Index> idx) const {
        return at(std::span<const Index>(idx.begin(), idx.size()));
    }
    double& at(std::initializer_list<Index> idx) {
        return values_[flat_index(std::span<const Index>(idx.begin(), idx.size()))];
    }

    Index flat_index(std::span<const Index> idx) const;

    bool same_dims(const Tensor& other) const { return dims_ == other.dims_; }

private:
    std::vector<Index> dims_;
    Vector values_;
};

/// Mode-`mode` unfolding: rows index the chosen mode, columns enumerate all
/// remaining modes lexicographically with the lowest remaining mode varying
/// fastest. Modes are 0-based.
Matrix unfold(const Tensor& z, int mode);

/// Exact inverse of unfold under the same column-order convention.
Tensor fold(const Matrix& m, int mode, const std::vector<Index>& dims);

/// Mode product z x_mode w: replaces extent d_mode by w.rows(). Requires
/// w.cols() == d_mode. Equals fold(w * unfold(z, mode), mode, new dims).
Tensor mode_product(const Tensor& z, const Matrix& w, int mode);

/// Sum of squared entrywise differences. Requires identical dims.
double sq_distance(const Tensor& a, const Tensor& b);

/// Entrywise arithmetic mean of a nonempty list of same-shaped tensors.
Tensor mean_tensor(const std::vector<Tensor>& samples);

/// View an m x n matrix as an order-2 tensor (canonical layout; mode 0 = rows).
Tensor matrix_as_tensor(const Matrix& m);

/// Flatten a tensor into a vector in canonical layout.
Vector vectorize(const Tensor& z);

}  // namespace mbda
