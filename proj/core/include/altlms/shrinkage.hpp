#pragma once

#include <cstddef>
#include <string>

#include "altlms/types.hpp"

namespace altlms {

enum class PenaltyKind { None, L1, LogSum, L0Approx };

/// Penalty choice with its shape parameter. `epsilon` is used by LogSum,
/// `beta` by L0Approx; other kinds ignore both.
struct ShrinkageSpec {
    PenaltyKind kind = PenaltyKind::None;
    double epsilon = 0.0;
    double beta = 0.0;
    // LogSum only: use the exact element-wise gradient instead of the
    // tabulated csign(a)/(1 + eps*||a||_1) direction.
    bool exact_logsum_gradient = false;

    static ShrinkageSpec none() { return {}; }
    static ShrinkageSpec l1() { return {PenaltyKind::L1, 0.0, 0.0, false}; }
    static ShrinkageSpec log_sum(double epsilon) { return {PenaltyKind::LogSum, epsilon, 0.0, false}; }
    static ShrinkageSpec l0_approx(double beta) { return {PenaltyKind::L0Approx, 0.0, beta, false}; }

    void validate() const;

    bool operator==(const ShrinkageSpec&) const = default;
};

struct OpCount {
    long long adds = 0;
    long long mults = 0;
    long long divs = 0;

    OpCount& operator+=(const OpCount& o) {
        adds += o.adds;
        mults += o.mults;
        divs += o.divs;
        return *this;
    }
    friend OpCount operator+(OpCount a, const OpCount& b) { return a += b; }
    friend OpCount operator*(long long s, OpCount a) { return {s * a.adds, s * a.mults, s * a.divs}; }
    bool operator==(const OpCount&) const = default;
};

std::string to_string(PenaltyKind kind);
PenaltyKind penalty_from_string(const std::string& name);

/// sgn(Re z) + j sgn(Im z), with sgn(0) = 0.
Complex csign(Complex z);

double penalty_value(const ShrinkageSpec& spec, const ComplexVec& a);

/// Update direction used by the shrinkage term of the adaptive recursions:
///   L1:       csign(a_m)
///   LogSum:   csign(a_m) / (1 + eps * ||a||_1)
///   L0Approx: beta*csign(a_m) - beta^2 a_m  where |a_m| <= 1/beta, else 0
/// These follow the derivative convention d/dRe + j d/dIm applied to the
/// separable form; they are the directions the algorithms step along, not
/// exact gradients of penalty_value (see wirtinger_gradient).
ComplexVec subgradient(const ShrinkageSpec& spec, const ComplexVec& a);

/// Exact Wirtinger derivative df/da* = (df/dRe + j df/dIm) / 2 of
/// penalty_value, taken as zero at a_m = 0.
ComplexVec wirtinger_gradient(const ShrinkageSpec& spec, const ComplexVec& a);

/// Outer-product approximation L_a of E[f'(a) f'(a)^H] around the optimum.
/// For L0Approx the entries outside the active region |a_m| <= 1/beta are
/// zero, where the update direction itself vanishes.
ComplexMat l_matrix(const ShrinkageSpec& spec, const ComplexVec& a_opt);

/// Diagonal of l_matrix without forming the matrix.
RealVec l_diagonal(const ShrinkageSpec& spec, const ComplexVec& a_opt);

/// Arithmetic cost C_s of one application of the shrinkage to an M-vector.
OpCount shrinkage_cost(const ShrinkageSpec& spec, std::size_t m);

}  // namespace altlms
