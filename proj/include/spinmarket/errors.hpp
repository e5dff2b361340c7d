#pragma once

#include <stdexcept>
#include <string>

namespace spinmarket {

/// Base for every error thrown by the library.
class error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A configuration value or argument violates its documented range.
class invalid_configuration : public error {
public:
    using error::error;
};

/// Too few samples, blocks or fit points to compute a statistic.
class insufficient_data : public error {
public:
    using error::error;
};

/// Parameter outside the domain where a formula is defined (e.g. n < 2 for the SR density).
class unsupported_parameter : public error {
public:
    using error::error;
};

/// An internal invariant was broken. Should be unreachable.
class internal_corruption : public error {
public:
    using error::error;
};

/// File missing, unreadable, malformed or not writable.
class io_error : public error {
public:
    using error::error;
};

} // namespace spinmarket
