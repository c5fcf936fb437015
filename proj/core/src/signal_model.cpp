#include "altlms/signal_model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

namespace altlms {

Complex complex_gaussian(Rng& rng, double variance) {
    std::normal_distribution<double> normal(0.0, std::sqrt(variance / 2.0));
    const double re = normal(rng);
    const double im = normal(rng);
    return {re, im};
}

SparseSystem generate_sparse_system(std::size_t m, std::size_t k, CoeffMode mode, Rng& rng) {
    if (m == 0) throw InvalidArgument("generate_sparse_system: m must be >= 1");
    if (k == 0 || k > m) {
        throw InvalidArgument("generate_sparse_system: need 1 <= k <= m (k=" + std::to_string(k) +
                              ", m=" + std::to_string(m) + ")");
    }

    // Partial Fisher-Yates: first k entries of the permutation form a uniform k-subset.
    std::vector<std::size_t> idx(m);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    for (std::size_t i = 0; i < k; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, m - 1);
        std::swap(idx[i], idx[pick(rng)]);
    }
    std::vector<std::size_t> support(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k));
    std::sort(support.begin(), support.end());

    SparseSystem sys;
    sys.w_o = ComplexVec::Zero(static_cast<Eigen::Index>(m));
    sys.p_o = oracle_vector(m, support);
    sys.support = std::move(support);

    std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
    for (std::size_t n : sys.support) {
        Complex tap;
        if (mode == CoeffMode::UnitTaps) {
            tap = std::polar(1.0, phase(rng));
        } else {
            do {
                tap = complex_gaussian(rng, 1.0);
            } while (std::abs(tap) < 1e-3);
        }
        sys.w_o[static_cast<Eigen::Index>(n)] = tap;
    }
    return sys;
}

SparseSystem sparse_system_from_taps(const ComplexVec& w_o) {
    if (w_o.size() == 0) throw InvalidArgument("sparse_system_from_taps: empty system");
    SparseSystem sys;
    sys.w_o = w_o;
    for (Eigen::Index n = 0; n < w_o.size(); ++n) {
        if (w_o[n] != Complex{0.0, 0.0}) sys.support.push_back(static_cast<std::size_t>(n));
    }
    sys.p_o = oracle_vector(static_cast<std::size_t>(w_o.size()), sys.support);
    return sys;
}

ComplexVec oracle_vector(std::size_t m, const std::vector<std::size_t>& support) {
    ComplexVec p = ComplexVec::Zero(static_cast<Eigen::Index>(m));
    for (std::size_t n : support) {
        if (n >= m) throw InvalidArgument("oracle_vector: support index out of range");
        p[static_cast<Eigen::Index>(n)] = 1.0;
    }
    return p;
}

InputProcess::InputProcess(std::size_t m, const InputConfig& config, Rng& rng)
    : m_(m), config_(config) {
    if (m == 0) throw InvalidArgument("InputProcess: m must be >= 1");
    if (!(config.sigma_x2 > 0.0)) throw InvalidArgument("InputProcess: sigma_x2 must be > 0");
    if (config.mode == InputMode::Ar1) {
        const double a = config.ar_coefficient;
        if (!(std::abs(a) < 1.0)) throw InvalidArgument("InputProcess: |ar_coefficient| must be < 1");
        if (config.style == RegressorStyle::IidVector) {
            throw InvalidArgument("InputProcess: Ar1 input requires the tapped-delay-line regressor");
        }
        normalizer_ = std::sqrt(1.0 - a * a);
        ar_state_ = complex_gaussian(rng, config.sigma_x2 / (1.0 - a * a));
    }
    if (config.style == RegressorStyle::TappedDelayLine) {
        line_.assign(m, Complex{0.0, 0.0});
        for (std::size_t i = 0; i < m; ++i) {
            head_ = (head_ + m_ - 1) % m_;
            line_[head_] = next_sample(rng);
        }
    }
}

Complex InputProcess::next_sample(Rng& rng) {
    const Complex v = complex_gaussian(rng, config_.sigma_x2);
    if (config_.mode == InputMode::White) return v;
    ar_state_ = config_.ar_coefficient * ar_state_ + v;
    return normalizer_ * ar_state_;
}

ComplexVec InputProcess::next_regressor(Rng& rng) {
    const auto m = static_cast<Eigen::Index>(m_);
    ComplexVec x(m);
    if (config_.style == RegressorStyle::IidVector) {
        for (Eigen::Index n = 0; n < m; ++n) x[n] = complex_gaussian(rng, config_.sigma_x2);
        return x;
    }
    head_ = (head_ + m_ - 1) % m_;
    line_[head_] = next_sample(rng);
    for (std::size_t n = 0; n < m_; ++n) x[static_cast<Eigen::Index>(n)] = line_[(head_ + n) % m_];
    return x;
}

Measurement measure(const SparseSystem& sys, const ComplexVec& x, double sigma_n2, Rng& rng) {
    require_same_length(sys.w_o, x, "measure");
    if (sigma_n2 < 0.0) throw InvalidArgument("measure: sigma_n2 must be >= 0");
    Measurement out;
    out.d_clean = sys.w_o.dot(x);  // Eigen's dot conjugates the left operand
    out.noise = sigma_n2 > 0.0 ? complex_gaussian(rng, sigma_n2) : Complex{0.0, 0.0};
    out.d_noisy = out.d_clean + out.noise;
    return out;
}

}  // namespace altlms
