#ifndef SQDATI_ERRORS_HPP
#define SQDATI_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace sqdati {

struct TruncationError : std::runtime_error {
    explicit TruncationError(const std::string& msg) : std::runtime_error(msg) {}
};

struct DimensionMismatch : std::runtime_error {
    explicit DimensionMismatch(const std::string& msg) : std::runtime_error(msg) {}
};

struct GridTooSmall : std::runtime_error {
    explicit GridTooSmall(const std::string& msg) : std::runtime_error(msg) {}
};

struct NoSeed : std::runtime_error {
    explicit NoSeed(const std::string& msg) : std::runtime_error(msg) {}
};

struct Diverged : std::runtime_error {
    Diverged(int seed_id, const std::string& msg)
        : std::runtime_error(msg), seed(seed_id) {}
    int seed;
};

struct SingularHessian : std::runtime_error {
    explicit SingularHessian(const std::string& msg) : std::runtime_error(msg) {}
};

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

struct ComputeError : std::runtime_error {
    explicit ComputeError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace sqdati

#endif
