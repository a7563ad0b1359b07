#pragma once

#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace ksbox {

// Dense row-major tensor of doubles with a small rank (rank <= 4 in
// practice; the last axis is contiguous).
class Tensor {
public:
    Tensor() = default;

    explicit Tensor(std::vector<int> dims) : dims_(std::move(dims)) {
        std::size_t n = 1;
        for (int d : dims_) {
            if (d <= 0) throw std::invalid_argument("Tensor: dims must be positive");
            n *= static_cast<std::size_t>(d);
        }
        data_.assign(n, 0.0);
    }

    const std::vector<int>& dims() const { return dims_; }
    int rank() const { return static_cast<int>(dims_.size()); }
    std::size_t size() const { return data_.size(); }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }

    double& operator[](std::size_t i) { return data_[i]; }
    double operator[](std::size_t i) const { return data_[i]; }

    // Multi-index access, row-major.
    double& at(const std::vector<int>& idx) { return data_[offset(idx)]; }
    double at(const std::vector<int>& idx) const { return data_[offset(idx)]; }

    std::size_t offset(const std::vector<int>& idx) const {
        std::size_t off = 0;
        for (std::size_t d = 0; d < dims_.size(); ++d)
            off = off * static_cast<std::size_t>(dims_[d]) + static_cast<std::size_t>(idx[d]);
        return off;
    }

private:
    std::vector<int> dims_;
    std::vector<double> data_;
};

namespace detail {

// out = M applied along `axis` of `in`, where M is rows x cols row-major
// and cols == in.dims()[axis].  All transforms and mode couplings reduce
// to this kernel.
inline Tensor apply_axis(const double* M, int rows, int cols, const Tensor& in, int axis) {
    const auto& d = in.dims();
    if (axis < 0 || axis >= in.rank()) throw std::invalid_argument("apply_axis: bad axis");
    if (d[static_cast<std::size_t>(axis)] != cols)
        throw std::invalid_argument("apply_axis: matrix/tensor extent mismatch");

    std::size_t outer = 1, inner = 1;
    for (int i = 0; i < axis; ++i) outer *= static_cast<std::size_t>(d[static_cast<std::size_t>(i)]);
    for (int i = axis + 1; i < in.rank(); ++i) inner *= static_cast<std::size_t>(d[static_cast<std::size_t>(i)]);

    std::vector<int> od = d;
    od[static_cast<std::size_t>(axis)] = rows;
    Tensor out(od);

    const double* src0 = in.data();
    double* dst0 = out.data();
    const std::size_t in_block = static_cast<std::size_t>(cols) * inner;
    const std::size_t out_block = static_cast<std::size_t>(rows) * inner;

    if (inner == 1) {
        for (std::size_t o = 0; o < outer; ++o) {
            const double* src = src0 + o * in_block;
            double* dst = dst0 + o * out_block;
            for (int r = 0; r < rows; ++r) {
                const double* mr = M + static_cast<std::size_t>(r) * cols;
                double acc = 0.0;
                for (int q = 0; q < cols; ++q) acc += mr[q] * src[q];
                dst[r] = acc;
            }
        }
    } else {
        for (std::size_t o = 0; o < outer; ++o) {
            const double* src = src0 + o * in_block;
            double* dst = dst0 + o * out_block;
            for (int r = 0; r < rows; ++r) {
                const double* mr = M + static_cast<std::size_t>(r) * cols;
                double* drow = dst + static_cast<std::size_t>(r) * inner;
                for (int q = 0; q < cols; ++q) {
                    const double m = mr[q];
                    if (m == 0.0) continue;  // coupling matrices are half zeros
                    const double* srow = src + static_cast<std::size_t>(q) * inner;
                    for (std::size_t i = 0; i < inner; ++i) drow[i] += m * srow[i];
                }
            }
        }
    }
    return out;
}

} // namespace detail
} // namespace ksbox
