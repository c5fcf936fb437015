#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "altlms/shrinkage.hpp"
#include "altlms/types.hpp"

namespace altlms {

enum class AlgorithmKind { Lms, SaLms, SaAltLms, OracleLms };

/// Intra-step sequencing for SA-ALT-LMS. Jacobi forms e once from (w, p)
/// and updates both from it; GaussSeidel recomputes e with the new p before
/// the w update.
enum class UpdateOrder { Jacobi, GaussSeidel };

std::string to_string(AlgorithmKind kind);
AlgorithmKind algorithm_from_string(const std::string& name);
std::string to_string(UpdateOrder order);
UpdateOrder update_order_from_string(const std::string& name);

/// Adaptive state of one filter. `p` is the diagonal pre-filter: adapted by
/// SA-ALT-LMS, fixed to ones for LMS/SA-LMS and to the oracle vector for
/// Oracle-LMS.
struct FilterState {
    AlgorithmKind kind = AlgorithmKind::Lms;
    ComplexVec w;
    ComplexVec p;
    double mu = 0.0;
    double eta = 0.0;
    double gamma = 0.0;  // mu * tau
    double alpha = 0.0;  // eta * lambda
    ShrinkageSpec spec_w;
    ShrinkageSpec spec_p;
    UpdateOrder order = UpdateOrder::Jacobi;
    std::vector<std::size_t> oracle_support;
    std::size_t iteration = 0;

    std::size_t m() const { return static_cast<std::size_t>(w.size()); }
};

struct StepOutput {
    Complex d_hat;
    Complex error;
    double squared_error = 0.0;
};

FilterState make_lms(std::size_t m, double mu);
FilterState make_sa_lms(std::size_t m, double mu, double gamma, const ShrinkageSpec& spec);
/// p[0] = ones, w[0] = zeros.
FilterState make_sa_alt_lms(std::size_t m, double mu, double eta, double gamma, double alpha,
                            const ShrinkageSpec& spec_w, const ShrinkageSpec& spec_p,
                            UpdateOrder order = UpdateOrder::Jacobi);
FilterState make_oracle_lms(std::size_t m, double mu, const std::vector<std::size_t>& support);

/// Replaces the genie support; taps outside the new support are zeroed.
void set_oracle_support(FilterState& state, const std::vector<std::size_t>& support);

/// w^H diag(p) x.
Complex predict(const FilterState& state, const ComplexVec& x);

StepOutput lms_step(FilterState& state, const ComplexVec& x, Complex d_noisy);
StepOutput sa_lms_step(FilterState& state, const ComplexVec& x, Complex d_noisy);
StepOutput sa_alt_lms_step(FilterState& state, const ComplexVec& x, Complex d_noisy);
StepOutput oracle_lms_step(FilterState& state, const ComplexVec& x, Complex d_noisy);

/// Dispatches on state.kind.
StepOutput step(FilterState& state, const ComplexVec& x, Complex d_noisy);

inline constexpr double kDivergenceThreshold = 1e12;

/// True when the last step left non-finite taps or |e|^2 above the threshold.
bool diverged(const FilterState& state, const StepOutput& out);

/// Per-iteration arithmetic cost. Oracle-LMS has no tabulated cost.
OpCount algorithm_cost(AlgorithmKind kind, const ShrinkageSpec& spec, std::size_t m);

}  // namespace altlms
