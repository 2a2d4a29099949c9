#include "ttrz/dense.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace ttrz {

Shape::Shape(std::vector<std::size_t> dims) : dims_(std::move(dims)) {
    if (dims_.empty()) throw ShapeMismatch("shape must have at least one mode");
    std::size_t count = 1;
    for (std::size_t d : dims_) {
        if (d == 0) throw ShapeMismatch("shape dims must be >= 1");
        if (d != 0 && count > std::numeric_limits<std::size_t>::max() / d)
            throw ShapeMismatch("shape element count overflows");
        count *= d;
    }
    count_ = count;
}

std::size_t flat_index(const Shape& shape, const std::vector<std::size_t>& idx) {
    if (idx.size() != shape.order())
        throw IndexOutOfRange("multi-index order does not match shape order");
    std::size_t flat = 0;
    for (std::size_t k = 0; k < idx.size(); ++k) {
        if (idx[k] >= shape.dim(k))
            throw IndexOutOfRange("index " + std::to_string(idx[k]) + " out of range for mode " +
                                  std::to_string(k));
        flat = flat * shape.dim(k) + idx[k];
    }
    return flat;
}

DenseTensor::DenseTensor(Shape shape)
    : shape_(std::move(shape)), data_(shape_.element_count(), 0.0) {}

DenseTensor::DenseTensor(Shape shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
    if (data_.size() != shape_.element_count())
        throw ShapeMismatch("data length does not match shape element count");
}

double DenseTensor::at(const std::vector<std::size_t>& idx) const {
    return data_[flat_index(shape_, idx)];
}

double& DenseTensor::at(const std::vector<std::size_t>& idx) {
    return data_[flat_index(shape_, idx)];
}

Matrix::Matrix(std::size_t r, std::size_t c, std::vector<double> d)
    : rows(r), cols(c), data(std::move(d)) {
    if (data.size() != rows * cols) throw ShapeMismatch("matrix data length != rows * cols");
}

namespace {

double norm_of(const std::vector<double>& v) {
    double sum = 0.0;
    for (double x : v) sum += x * x;
    return std::sqrt(sum);
}

} // namespace

double frobenius_norm(const DenseTensor& t) { return norm_of(t.data()); }

double frobenius_norm(const Matrix& m) { return norm_of(m.data); }

DenseTensor reshape(const DenseTensor& t, const Shape& new_shape) {
    if (new_shape.element_count() != t.shape().element_count())
        throw ShapeMismatch("reshape changes the element count");
    return DenseTensor(new_shape, t.data());
}

Matrix matricize(const DenseTensor& t, std::size_t split) {
    const std::size_t order = t.shape().order();
    if (split < 1 || split >= order)
        throw SplitOutOfRange("matricize split must lie in [1, K-1]");
    std::size_t rows = 1, cols = 1;
    for (std::size_t k = 0; k < split; ++k) rows *= t.shape().dim(k);
    for (std::size_t k = split; k < order; ++k) cols *= t.shape().dim(k);
    // Row-major data is already laid out as rows x cols for this split.
    return Matrix(rows, cols, t.data());
}

DenseTensor dematricize(const Matrix& m, const Shape& shape, std::size_t split) {
    const std::size_t order = shape.order();
    if (split < 1 || split >= order)
        throw SplitOutOfRange("dematricize split must lie in [1, K-1]");
    std::size_t rows = 1, cols = 1;
    for (std::size_t k = 0; k < split; ++k) rows *= shape.dim(k);
    for (std::size_t k = split; k < order; ++k) cols *= shape.dim(k);
    if (rows != m.rows || cols != m.cols)
        throw ShapeMismatch("matrix dims do not match shape at this split");
    return DenseTensor(shape, m.data);
}

} // namespace ttrz
