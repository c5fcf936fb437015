#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <set>

#include "altlms/signal_model.hpp"

using namespace altlms;

namespace {

std::vector<Complex> scalar_stream(const InputConfig& cfg, std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    InputProcess proc(1, cfg, rng);
    std::vector<Complex> out(n);
    for (auto& v : out) v = proc.next_sample(rng);
    return out;
}

}  // namespace

TEST(SparseSystem, HasExactlyKNonZeros) {
    for (auto mode : {CoeffMode::UnitTaps, CoeffMode::ComplexGaussianTaps}) {
        Rng rng(3);
        for (int rep = 0; rep < 50; ++rep) {
            const auto sys = generate_sparse_system(16, 2, mode, rng);
            ASSERT_EQ(sys.k(), 2u);
            std::size_t nonzero = 0;
            for (Eigen::Index n = 0; n < 16; ++n) {
                const bool on = std::find(sys.support.begin(), sys.support.end(), std::size_t(n)) != sys.support.end();
                if (on) {
                    EXPECT_NE(sys.w_o[n], Complex(0.0, 0.0));
                    EXPECT_EQ(sys.p_o[n], Complex(1.0, 0.0));
                    if (mode == CoeffMode::UnitTaps) EXPECT_NEAR(std::abs(sys.w_o[n]), 1.0, 1e-15);
                    if (mode == CoeffMode::ComplexGaussianTaps) EXPECT_GE(std::abs(sys.w_o[n]), 1e-3);
                    ++nonzero;
                } else {
                    EXPECT_EQ(sys.w_o[n], Complex(0.0, 0.0));
                    EXPECT_EQ(sys.p_o[n], Complex(0.0, 0.0));
                }
            }
            EXPECT_EQ(nonzero, 2u);
        }
    }
}

TEST(SparseSystem, SingleTapIsForced) {
    Rng rng(11);
    const auto sys = generate_sparse_system(1, 1, CoeffMode::UnitTaps, rng);
    ASSERT_EQ(sys.support, std::vector<std::size_t>{0});
    EXPECT_EQ(sys.p_o[0], Complex(1.0, 0.0));
}

TEST(SparseSystem, FixedSeedRegressionFixture) {
    // Recorded from the first run; guards the support-sampling path.
    Rng rng(7);
    const auto sys = generate_sparse_system(32, 4, CoeffMode::ComplexGaussianTaps, rng);
    EXPECT_EQ(sys.support, (std::vector<std::size_t>{5, 24, 28, 30}));
}

TEST(SparseSystem, RejectsBadCardinality) {
    Rng rng(1);
    EXPECT_THROW(generate_sparse_system(4, 5, CoeffMode::UnitTaps, rng), InvalidArgument);
    EXPECT_THROW(generate_sparse_system(4, 0, CoeffMode::UnitTaps, rng), InvalidArgument);
}

TEST(SparseSystem, SupportIsUniform) {
    // Each index should be picked with probability k/m.
    Rng rng(5);
    std::vector<int> hits(8, 0);
    constexpr int reps = 40000;
    for (int r = 0; r < reps; ++r) {
        for (auto n : generate_sparse_system(8, 3, CoeffMode::UnitTaps, rng).support) ++hits[n];
    }
    for (int h : hits) EXPECT_NEAR(h / double(reps), 3.0 / 8.0, 0.01);
}

TEST(SparseSystem, OffSupportInnerProductIsZero) {
    Rng rng(9);
    const auto sys = generate_sparse_system(12, 3, CoeffMode::ComplexGaussianTaps, rng);
    ComplexVec v = ComplexVec::Zero(12);
    for (Eigen::Index n = 0; n < 12; ++n) v[n] = complex_gaussian(rng, 1.0) * (1.0 - sys.p_o[n].real());
    EXPECT_EQ(sys.w_o.dot(v), Complex(0.0, 0.0));
}

TEST(InputProcess, WhiteVariance) {
    const auto xs = scalar_stream({InputMode::White, 0.8, RegressorStyle::TappedDelayLine, 2.0}, 1'000'000, 21);
    double power = 0.0;
    for (auto v : xs) power += std::norm(v);
    EXPECT_NEAR(power / xs.size(), 2.0, 0.02 * 2.0);
}

TEST(InputProcess, Ar1LagOneCorrelationAndVariance) {
    const auto xs = scalar_stream({InputMode::Ar1, 0.8, RegressorStyle::TappedDelayLine, 1.0}, 1'000'000, 22);
    double power = 0.0;
    Complex lag1{0.0, 0.0};
    for (std::size_t i = 0; i < xs.size(); ++i) {
        power += std::norm(xs[i]);
        if (i > 0) lag1 += xs[i] * std::conj(xs[i - 1]);
    }
    power /= xs.size();
    lag1 /= double(xs.size() - 1);
    EXPECT_NEAR(power, 1.0, 0.02);
    EXPECT_NEAR(lag1.real() / power, 0.8, 0.02);
    EXPECT_NEAR(lag1.imag() / power, 0.0, 0.02);
}

TEST(InputProcess, Ar1NormalizerRestoresVariance) {
    Rng rng(1);
    InputProcess proc(4, {InputMode::Ar1, 0.8, RegressorStyle::TappedDelayLine, 1.0}, rng);
    // var = sigma^2 * normalizer^2 / (1 - a^2) = sigma^2
    EXPECT_NEAR(proc.normalizer() * proc.normalizer() / (1.0 - 0.64), 1.0, 1e-12);
}

TEST(InputProcess, DelayLineShiftsNewestFirst) {
    Rng rng(4);
    InputProcess proc(5, {InputMode::White, 0.8, RegressorStyle::TappedDelayLine, 1.0}, rng);
    ComplexVec prev = proc.next_regressor(rng);
    for (int i = 0; i < 20; ++i) {
        const ComplexVec x = proc.next_regressor(rng);
        for (Eigen::Index n = 1; n < 5; ++n) EXPECT_EQ(x[n], prev[n - 1]);
        prev = x;
    }
}

TEST(InputProcess, DelayLineIsPrefilled) {
    Rng rng(6);
    InputProcess proc(8, {InputMode::White, 0.8, RegressorStyle::TappedDelayLine, 1.0}, rng);
    const ComplexVec x = proc.next_regressor(rng);
    for (Eigen::Index n = 0; n < 8; ++n) EXPECT_NE(x[n], Complex(0.0, 0.0));
}

TEST(InputProcess, WhiteRegressorCovarianceIsScaledIdentity) {
    for (auto style : {RegressorStyle::IidVector, RegressorStyle::TappedDelayLine}) {
        Rng rng(8);
        InputProcess proc(4, {InputMode::White, 0.8, style, 1.0}, rng);
        ComplexMat cov = ComplexMat::Zero(4, 4);
        constexpr int draws = 200'000;
        for (int i = 0; i < draws; ++i) {
            const ComplexVec x = proc.next_regressor(rng);
            cov += x * x.adjoint();
        }
        cov /= double(draws);
        const double err = (cov - ComplexMat::Identity(4, 4)).cwiseAbs().maxCoeff();
        EXPECT_LT(err, 0.02);
    }
}

TEST(InputProcess, RejectsAr1WithIidVectors) {
    Rng rng(1);
    EXPECT_THROW(InputProcess(4, {InputMode::Ar1, 0.8, RegressorStyle::IidVector, 1.0}, rng), InvalidArgument);
}

TEST(InputProcess, SameSeedSameStream) {
    const InputConfig cfg{InputMode::Ar1, 0.8, RegressorStyle::TappedDelayLine, 1.0};
    EXPECT_EQ(scalar_stream(cfg, 1000, 99), scalar_stream(cfg, 1000, 99));
    EXPECT_NE(scalar_stream(cfg, 1000, 99), scalar_stream(cfg, 1000, 100));
}

TEST(Measure, ZeroSystemNoNoise) {
    Rng rng(1);
    const auto sys = sparse_system_from_taps(ComplexVec::Zero(4));
    const ComplexVec x = ComplexVec::Constant(4, Complex(0.3, -1.2));
    const auto meas = measure(sys, x, 0.0, rng);
    EXPECT_EQ(meas.d_noisy, Complex(0.0, 0.0));
}

TEST(Measure, SingleTapIdentity) {
    Rng rng(1);
    ComplexVec w = ComplexVec::Zero(3);
    w[0] = Complex(0.6, 0.8);
    const auto sys = sparse_system_from_taps(w);
    ComplexVec x(3);
    x << Complex(1.5, -0.5), Complex(2.0, 1.0), Complex(-3.0, 0.25);
    const auto meas = measure(sys, x, 0.0, rng);
    EXPECT_NEAR(std::abs(meas.d_noisy - std::conj(w[0]) * x[0]), 0.0, 1e-15);
}

TEST(Measure, NoiseDecomposition) {
    Rng rng(2);
    const auto sys = generate_sparse_system(8, 2, CoeffMode::UnitTaps, rng);
    InputProcess proc(8, {}, rng);
    for (int i = 0; i < 100; ++i) {
        const auto meas = measure(sys, proc.next_regressor(rng), 1e-3, rng);
        EXPECT_NEAR(std::abs(meas.d_noisy - meas.noise - meas.d_clean), 0.0, 1e-15);
    }
}

TEST(Measure, NoiseVarianceMatchesSnr) {
    EXPECT_NEAR(noise_variance_for_snr(30.0, 1.0), 1e-3, 1e-18);
    EXPECT_NEAR(10.0 * std::log10(1.0 / noise_variance_for_snr(30.0, 1.0)), 30.0, 1e-12);
    Rng rng(3);
    const auto sys = sparse_system_from_taps(ComplexVec::Zero(2));
    double power = 0.0;
    constexpr int draws = 200'000;
    for (int i = 0; i < draws; ++i) power += std::norm(measure(sys, ComplexVec::Zero(2), 1e-3, rng).noise);
    EXPECT_NEAR(power / draws, 1e-3, 2e-5);
}

TEST(Measure, LengthMismatch) {
    Rng rng(1);
    const auto sys = sparse_system_from_taps(ComplexVec::Ones(4));
    EXPECT_THROW(measure(sys, ComplexVec::Ones(3), 0.0, rng), InvalidArgument);
}
