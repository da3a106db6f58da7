#pragma once

#include <stdexcept>
#include <string>

namespace causal {

// Problems with input data: unreadable files, malformed CSV, tables that
// violate the cleaning invariants. The CLI maps these to their own exit code.
struct DataError : std::runtime_error {
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

struct CollinearColumnsError : DataError {
    explicit CollinearColumnsError(const std::string& what) : DataError(what) {}
};

struct AlignmentError : DataError {
    explicit AlignmentError(const std::string& what) : DataError(what) {}
};

// A subsample draw whose table no longer satisfies the cleaning invariants
// (typically a column went constant). Audits skip the run and keep going.
struct DegenerateSubsampleError : DataError {
    explicit DegenerateSubsampleError(const std::string& what) : DataError(what) {}
};

// A structure generator failed on otherwise valid data.
struct GeneratorError : std::runtime_error {
    explicit GeneratorError(const std::string& what) : std::runtime_error(what) {}
};

struct FastIcaError : GeneratorError {
    explicit FastIcaError(const std::string& what) : GeneratorError(what) {}
};

}  // namespace causal
