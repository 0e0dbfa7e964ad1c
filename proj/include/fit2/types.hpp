#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace fit2
{

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using Vector = VectorX<double>;
using Matrix = MatrixX<double>;

// Row-major storage so that H rows can be filled one sample at a time.
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Shape or length disagreement between arguments.
class DimensionError : public Error
{
public:
    using Error::Error;
};

/// Argument outside its documented domain (non-finite values, degenerate ranges, ...).
class ValidationError : public Error
{
public:
    using Error::Error;
};

/// Every upper firing strength is zero: the rule base has no opinion about the input.
class NoRuleFiresError : public Error
{
public:
    using Error::Error;
};

class ConvergenceError : public Error
{
public:
    using Error::Error;
};

inline void require_same_size(Eigen::Index a, Eigen::Index b, const char* what)
{
    if (a != b)
        throw DimensionError(std::string(what) + ": expected " + std::to_string(a) + " entries, got " +
                             std::to_string(b));
}

} // namespace fit2
