#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "altlms/types.hpp"

namespace altlms {

using Rng = std::mt19937_64;

enum class CoeffMode { UnitTaps, ComplexGaussianTaps };
enum class InputMode { White, Ar1 };
enum class RegressorStyle { TappedDelayLine, IidVector };

/// True system w_o with K non-zero taps at `support` and the binary oracle
/// vector p_o marking those positions.
struct SparseSystem {
    ComplexVec w_o;
    std::vector<std::size_t> support;  // ascending
    ComplexVec p_o;

    std::size_t m() const { return static_cast<std::size_t>(w_o.size()); }
    std::size_t k() const { return support.size(); }
};

/// Circularly-symmetric complex Gaussian draw, variance split evenly
/// between real and imaginary parts.
Complex complex_gaussian(Rng& rng, double variance);

SparseSystem generate_sparse_system(std::size_t m, std::size_t k, CoeffMode mode, Rng& rng);

/// Builds the support set and oracle vector from the non-zero entries of w_o.
SparseSystem sparse_system_from_taps(const ComplexVec& w_o);

/// Builds an oracle-only system (taps unknown) from a support set.
ComplexVec oracle_vector(std::size_t m, const std::vector<std::size_t>& support);

struct InputConfig {
    InputMode mode = InputMode::White;
    double ar_coefficient = 0.8;
    RegressorStyle style = RegressorStyle::TappedDelayLine;
    double sigma_x2 = 1.0;

    bool operator==(const InputConfig&) const = default;
};

/// Source of regressors x[i].
///
/// TappedDelayLine pushes one scalar per call and returns the last M samples
/// newest-first; the line is pre-filled with M samples at construction so the
/// first regressor carries no zeros. In Ar1 mode the scalar stream is
/// x_c[i] = a x_c[i-1] + v[i], scaled by sqrt(1 - a^2) so that its stationary
/// variance is sigma_x2. The recursion state starts from its stationary law.
/// IidVector draws a fresh white M-vector each call (Ar1 is not meaningful
/// there and is rejected).
class InputProcess {
public:
    InputProcess(std::size_t m, const InputConfig& config, Rng& rng);

    ComplexVec next_regressor(Rng& rng);

    /// Next scalar of the underlying stream (White or normalized Ar1).
    Complex next_sample(Rng& rng);

    std::size_t m() const { return m_; }
    double normalizer() const { return normalizer_; }
    const InputConfig& config() const { return config_; }

private:
    std::size_t m_;
    InputConfig config_;
    double normalizer_ = 1.0;
    Complex ar_state_{0.0, 0.0};
    std::vector<Complex> line_;  // ring buffer, newest at head_
    std::size_t head_ = 0;
};

struct Measurement {
    Complex d_clean;
    Complex noise;
    Complex d_noisy;
};

/// d = w_o^H x plus complex Gaussian noise of variance sigma_n2.
Measurement measure(const SparseSystem& sys, const ComplexVec& x, double sigma_n2, Rng& rng);

inline double noise_variance_for_snr(double snr_db, double sigma_x2) {
    return sigma_x2 / std::pow(10.0, snr_db / 10.0);
}

}  // namespace altlms
