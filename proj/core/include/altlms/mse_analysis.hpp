#pragma once

#include <cstddef>
#include <vector>

#include "altlms/shrinkage.hpp"
#include "altlms/signal_model.hpp"
#include "altlms/types.hpp"

namespace altlms {

/// Inputs of the white-input MSE model for SA-ALT-LMS. R_x = sigma_x2 * I.
struct AnalysisInput {
    SparseSystem system;
    double sigma_x2 = 1.0;
    double sigma_n2 = 0.0;
    double mu = 0.0;
    double eta = 0.0;
    double alpha = 0.0;
    double gamma = 0.0;
    ShrinkageSpec spec_w;
    ShrinkageSpec spec_p;
    double j_min = 0.0;

    void validate() const;
};

/// gamma = mu*tau, alpha = eta*lambda, J_min = sigma_n2.
AnalysisInput make_analysis_input(const SparseSystem& system, double sigma_x2, double sigma_n2, double mu,
                                  double eta, double tau, double lambda, const ShrinkageSpec& spec);

/// lambda_px^n ~ sigma_x2 p_o^n and lambda_wx^n ~ sigma_x2 |w_o^n|^2.
RealVec lambda_px(const AnalysisInput& in);
RealVec lambda_wx(const AnalysisInput& in);

struct StabilityBounds {
    double mu_max = 0.0;
    double eta_max = 0.0;
};

/// mu_max = 2 / max lambda_px, eta_max = 2 / max lambda_wx. Entries must be > 0.
StabilityBounds stability_bounds(const RealVec& lambda_px, const RealVec& lambda_wx);

/// The same per-mode bound applied to plain LMS, whose update is driven by
/// the full regressor energy tr(R_x) = sigma_x2 * M.
double lms_step_bound(double sigma_x2, std::size_t m);

struct SteadyState {
    RealVec k_w;
    RealVec k_p;
    RealVec lambda_px;
    RealVec lambda_wx;
    double mse = 0.0;
    double mse_db = 0.0;
};

/// Closed-form fixed points of the decoupled K_w^n, K_p^n recursions and the
/// resulting MSE. Indices whose lambda is zero (off the support) have no
/// data-driven term and contribute zero. Throws UnstableConfiguration when a
/// step size reaches 2/lambda for some index.
SteadyState steady_state(const AnalysisInput& in);

struct TransientPoint {
    RealVec k_w;
    RealVec k_p;
    double mse = 0.0;
};

/// One application of the decoupled recursions
///   K^n <- (1 - mu lambda^n)^2 K^n + mu^2 J_min lambda^n + gamma^2 L^n.
TransientPoint advance(const AnalysisInput& in, const RealVec& k_w, const RealVec& k_p);

/// Iterates from K_w^n[0] = |w_o^n|^2 and K_p^n[0] = |1 - p_o^n|^2 (filters
/// start at w = 0, p = 1). Element i is the state after i updates; the result
/// has iterations + 1 entries.
std::vector<TransientPoint> transient_k(const AnalysisInput& in, std::size_t iterations);

/// J_min + sigma_x2 sum K_p K_w + sigma_x2 sum p_o |w_o|^2 K_p + sigma_x2 sum p_o K_w.
double mse_from_diagonals(const AnalysisInput& in, const RealVec& k_w, const RealVec& k_p);

/// J_min + tr[R_x (K_w o K_p)] + tr[R_x (w_o w_o^H o K_p)] + tr[R_x (p_o p_o^H o K_w)].
double trace_mse(const ComplexMat& r_x, const ComplexMat& k_w, const ComplexMat& k_p, const ComplexVec& w_o,
                 const ComplexVec& p_o, double j_min);

}  // namespace altlms
