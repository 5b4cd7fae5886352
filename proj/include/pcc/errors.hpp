#pragma once

#include <stdexcept>
#include <string>

namespace pcc {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An operation that requires points was given an empty cloud.
class EmptyCloudError : public Error {
public:
    explicit EmptyCloudError(const std::string& what) : Error(what) {}
};

/// A parameter is outside its documented domain.
class InvalidArgument : public Error {
public:
    explicit InvalidArgument(const std::string& what) : Error(what) {}
};

/// File system / parse failure; message carries the offending path.
class IoError : public Error {
public:
    IoError(const std::string& what, std::string path)
        : Error(what + ": " + path), path_(std::move(path)) {}
    const std::string& path() const { return path_; }

private:
    std::string path_;
};

/// Dataset manifest construction failure (duplicate ids, inconsistent totals).
class ManifestError : public Error {
public:
    explicit ManifestError(const std::string& what) : Error(what) {}
};

/// The toy trainer produced a non-finite loss; carries the step index.
class DivergedError : public Error {
public:
    DivergedError(const std::string& what, int step)
        : Error(what + " at step " + std::to_string(step)), step_(step) {}
    int step() const { return step_; }

private:
    int step_;
};

}  // namespace pcc
