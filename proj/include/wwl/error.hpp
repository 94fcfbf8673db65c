#ifndef WWL_ERROR_HPP
#define WWL_ERROR_HPP

#include <stdexcept>

namespace wwl {

/// Invalid input or data: bad graphs, malformed files, violated contracts.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Filesystem failures while reading or writing artifacts.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace wwl

#endif  // WWL_ERROR_HPP
