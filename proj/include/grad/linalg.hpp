// Dense row-major matrix plus the handful of kernels the GRU needs.
// The networks here are two layers of at most a few dozen units, so plain
// loops over contiguous rows are plenty fast.
#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "grad/util.hpp"

namespace grad {

class Mat {
public:
    Mat() = default;
    Mat(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }
    std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

    void fill(double v) { std::fill(data_.begin(), data_.end(), v); }

    bool operator==(const Mat&) const = default;

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<double> data_;
};

using Vec = std::vector<double>;

/// out = M x
inline void matvec(const Mat& m, std::span<const double> x, std::span<double> out) {
    for (std::size_t r = 0; r < m.rows(); ++r) {
        const double* row = m.data() + r * m.cols();
        double acc = 0.0;
        for (std::size_t c = 0; c < m.cols(); ++c) acc += row[c] * x[c];
        out[r] = acc;
    }
}

/// out += M^T y  (accumulates into out, length m.cols())
inline void matvec_t_add(const Mat& m, std::span<const double> y, std::span<double> out) {
    for (std::size_t r = 0; r < m.rows(); ++r) {
        const double* row = m.data() + r * m.cols();
        const double yr = y[r];
        for (std::size_t c = 0; c < m.cols(); ++c) out[c] += row[c] * yr;
    }
}

/// M += a b^T  (outer-product accumulation)
inline void ger_add(Mat& m, std::span<const double> a, std::span<const double> b) {
    for (std::size_t r = 0; r < m.rows(); ++r) {
        double* row = m.data() + r * m.cols();
        const double ar = a[r];
        for (std::size_t c = 0; c < m.cols(); ++c) row[c] += ar * b[c];
    }
}

inline void axpy(double a, std::span<const double> x, std::span<double> y) {
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

/// Numerically stable softmax; probabilities sum to 1 for finite logits.
inline Vec softmax(std::span<const double> logits) {
    double mx = logits[0];
    for (double v : logits) mx = std::max(mx, v);
    Vec out(logits.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        out[i] = std::exp(logits[i] - mx);
        sum += out[i];
    }
    for (auto& v : out) v /= sum;
    return out;
}

}  // namespace grad
