#pragma once

#include <stdexcept>
#include <string>

namespace sectionseg {

// Exit-code classes used by the CLI: usage/config = 1, data = 2, remote = 3.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RemoteError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct OverlappingSpans : DataError {
    using DataError::DataError;
};

struct UnknownLabel : DataError {
    using DataError::DataError;
};

struct MalformedInput : DataError {
    using DataError::DataError;
};

struct LengthMismatch : DataError {
    using DataError::DataError;
};

struct DimensionMismatch : DataError {
    using DataError::DataError;
};

struct EmptyTrainingSet : DataError {
    using DataError::DataError;
};

struct EmptyNote : DataError {
    using DataError::DataError;
};

struct MissingGold : DataError {
    using DataError::DataError;
};

struct DegenerateSample : DataError {
    using DataError::DataError;
};

struct TooFewValues : DataError {
    using DataError::DataError;
};

struct NoParsableLines : DataError {
    using DataError::DataError;
};

struct TransportError : RemoteError {
    using RemoteError::RemoteError;
};

struct HttpStatusError : RemoteError {
    int status;
    HttpStatusError(int status_code, const std::string& what)
        : RemoteError(what), status(status_code) {}
};

struct EmptyCompletion : RemoteError {
    using RemoteError::RemoteError;
};

} // namespace sectionseg
