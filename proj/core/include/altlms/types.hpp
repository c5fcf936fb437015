#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace altlms {

using Complex = std::complex<double>;
using ComplexVec = Eigen::VectorXcd;
using ComplexMat = Eigen::MatrixXcd;
using RealVec = Eigen::VectorXd;

inline constexpr const char* kVersion = "0.1.0";

// Bad shapes, out-of-range parameters, violated preconditions.
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Non-finite data fed into a filter step.
class NumericFault : public std::runtime_error {
public:
    NumericFault(const std::string& what, std::size_t iteration)
        : std::runtime_error(what + " (iteration " + std::to_string(iteration) + ")"),
          iteration_(iteration) {}

    std::size_t iteration() const noexcept { return iteration_; }

private:
    std::size_t iteration_;
};

// Step size at or beyond the analytical stability bound.
class UnstableConfiguration : public std::domain_error {
public:
    UnstableConfiguration(const std::string& what, std::size_t index)
        : std::domain_error(what), index_(index) {}

    std::size_t index() const noexcept { return index_; }

private:
    std::size_t index_;
};

inline void require_same_length(const ComplexVec& a, const ComplexVec& b, const char* where) {
    if (a.size() != b.size()) {
        throw InvalidArgument(std::string(where) + ": length mismatch (" + std::to_string(a.size()) +
                              " vs " + std::to_string(b.size()) + ")");
    }
}

inline bool all_finite(const ComplexVec& v) {
    return v.allFinite();
}

inline double to_db(double power) {
    constexpr double kFloorDb = -120.0;
    if (!(power > 0.0)) return kFloorDb;
    const double db = 10.0 * std::log10(power);
    return db < kFloorDb ? kFloorDb : db;
}

}  // namespace altlms
