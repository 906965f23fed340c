#pragma once

#include <stdexcept>
#include <string>

namespace lexharvest {

// Exit-code taxonomy used by the CLI: UsageError -> 1, DataError -> 2,
// anything else -> 3.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad invocation or configuration: unknown flags, invalid manifest fields,
// out-of-range parameters.
class UsageError : public Error {
public:
    using Error::Error;
};

// Malformed or inconsistent input data: bad JSONL lines, unknown labels,
// duplicate ids, protocol violations.
class DataError : public Error {
public:
    using Error::Error;
};

}  // namespace lexharvest
