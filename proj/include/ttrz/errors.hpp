#pragma once

#include <stdexcept>

namespace ttrz {

/// Base class of all errors thrown by this library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Element counts or mode sizes of two operands do not agree.
class ShapeMismatch : public Error {
public:
    using Error::Error;
};

/// Matricization split point outside [1, K-1].
class SplitOutOfRange : public Error {
public:
    using Error::Error;
};

/// Multi-index outside the tensor's shape.
class IndexOutOfRange : public Error {
public:
    using Error::Error;
};

/// A numerical backend (SVD, QR) failed to converge. Never downgraded to
/// a silent fallback.
class NumericalFailure : public Error {
public:
    using Error::Error;
};

/// Invalid run configuration (learning rate, step count, rank list, ...).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Dataset labels do not match the network's loss kind.
class LabelMismatch : public Error {
public:
    using Error::Error;
};

/// File could not be read, written, or parsed.
class IoError : public Error {
public:
    using Error::Error;
};

} // namespace ttrz
