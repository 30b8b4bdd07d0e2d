#pragma once

#include <stdexcept>
#include <string>

namespace geopitch {

/// Malformed or semantically invalid input data.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Failure to read or write a file.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace geopitch
