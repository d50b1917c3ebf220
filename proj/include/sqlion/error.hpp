#pragma once

#include <stdexcept>
#include <string>

namespace sqlion {

// Malformed or inconsistent input data: dictionary, dataset, model or corpus
// files. The CLI maps it to exit code 2.
class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A caller broke an operation's precondition (empty training set, bad split
// fraction, ...).
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Socket-level failure (bind, resolve, connect). The CLI maps it to exit code 3.
class NetworkError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace sqlion
