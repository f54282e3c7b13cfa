#pragma once

#include <cassert>
#include <cstddef>
#include <span>
#include <vector>

namespace n2n {

/// Dense row-major matrix of doubles. All numerics in this project are 64-bit.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}

    double& operator()(std::size_t r, std::size_t c) {
        assert(r < rows && c < cols);
        return data[r * cols + c];
    }
    double operator()(std::size_t r, std::size_t c) const {
        assert(r < rows && c < cols);
        return data[r * cols + c];
    }

    std::span<double> row(std::size_t r) {
        assert(r < rows);
        return {data.data() + r * cols, cols};
    }
    std::span<const double> row(std::size_t r) const {
        assert(r < rows);
        return {data.data() + r * cols, cols};
    }

    bool same_shape(const Matrix& other) const { return rows == other.rows && cols == other.cols; }
    std::size_t size() const { return data.size(); }
    void fill(double v) { data.assign(data.size(), v); }
};

inline double dot(std::span<const double> a, std::span<const double> b) {
    assert(a.size() == b.size());
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

}  // namespace n2n
