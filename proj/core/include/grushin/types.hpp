#pragma once

#include <Eigen/Dense>
#include <boost/multiprecision/float128.hpp>
#include <stdexcept>
#include <string>

namespace grushin {

// Largest N = m + k handled with stack storage.
inline constexpr int kMaxDim = 8;

using Quad = boost::multiprecision::float128;

template <class T>
using VecT = Eigen::Matrix<T, Eigen::Dynamic, 1, 0, kMaxDim, 1>;
template <class T>
using MatT = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxDim, kMaxDim>;

using Vec = VecT<double>;
using Mat = MatT<double>;

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// z = 0, the origin, or another point where a closed form has a zero denominator.
struct DomainError : Error {
  using Error::Error;
};

struct DimensionError : Error {
  using Error::Error;
};

struct FdError : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

struct BaselineError : Error {
  using Error::Error;
};

}  // namespace grushin
