#pragma once

#include <cstddef>
#include <vector>

#include "ttrz/errors.hpp"

namespace ttrz {

/// Mode sizes I_1,...,I_K of a K-order tensor. Order K >= 1, every dim >= 1,
/// and the element count must be representable in std::size_t.
class Shape {
public:
    Shape() = default;
    explicit Shape(std::vector<std::size_t> dims);

    std::size_t order() const { return dims_.size(); }
    std::size_t dim(std::size_t k) const { return dims_[k]; }
    const std::vector<std::size_t>& dims() const { return dims_; }
    std::size_t element_count() const { return count_; }

    bool operator==(const Shape& other) const { return dims_ == other.dims_; }

private:
    std::vector<std::size_t> dims_;
    std::size_t count_ = 0;
};

/// Flat offset of a multi-index under row-major order (last index fastest).
std::size_t flat_index(const Shape& shape, const std::vector<std::size_t>& idx);

/// Dense K-order tensor of doubles, row-major with the last index fastest.
class DenseTensor {
public:
    DenseTensor() = default;
    explicit DenseTensor(Shape shape);
    DenseTensor(Shape shape, std::vector<double> data);

    const Shape& shape() const { return shape_; }
    std::size_t size() const { return data_.size(); }
    const std::vector<double>& data() const { return data_; }
    std::vector<double>& data() { return data_; }

    double operator[](std::size_t flat) const { return data_[flat]; }
    double& operator[](std::size_t flat) { return data_[flat]; }
    double at(const std::vector<std::size_t>& idx) const;
    double& at(const std::vector<std::size_t>& idx);

private:
    Shape shape_;
    std::vector<double> data_;
};

/// Dense row-major matrix of doubles.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}
    Matrix(std::size_t r, std::size_t c, std::vector<double> d);

    double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
    double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    std::size_t size() const { return data.size(); }
};

double frobenius_norm(const DenseTensor& t);
double frobenius_norm(const Matrix& m);

/// Relabel the modes of a tensor; the flat data is shared bit-exactly.
/// Throws ShapeMismatch when element counts differ.
DenseTensor reshape(const DenseTensor& t, const Shape& new_shape);

/// Flatten modes 1..split into rows and modes split+1..K into columns.
/// Requires 1 <= split < K; throws SplitOutOfRange otherwise.
Matrix matricize(const DenseTensor& t, std::size_t split);

/// Inverse of matricize for the same shape and split point.
DenseTensor dematricize(const Matrix& m, const Shape& shape, std::size_t split);

} // namespace ttrz
