#include "altlms/mse_analysis.hpp"

#include <cmath>
#include <string>

namespace altlms {

void AnalysisInput::validate() const {
    if (system.m() == 0) throw InvalidArgument("analysis: empty system");
    if (!(sigma_x2 > 0.0) || !(sigma_n2 > 0.0)) throw InvalidArgument("analysis: variances must be > 0");
    if (!(mu > 0.0) || !(eta > 0.0)) throw InvalidArgument("analysis: step sizes must be > 0");
    if (alpha < 0.0 || gamma < 0.0) throw InvalidArgument("analysis: alpha, gamma must be >= 0");
    if (j_min < 0.0) throw InvalidArgument("analysis: j_min must be >= 0");
    spec_w.validate();
    spec_p.validate();
}

AnalysisInput make_analysis_input(const SparseSystem& system, double sigma_x2, double sigma_n2, double mu,
                                  double eta, double tau, double lambda, const ShrinkageSpec& spec) {
    AnalysisInput in;
    in.system = system;
    in.sigma_x2 = sigma_x2;
    in.sigma_n2 = sigma_n2;
    in.mu = mu;
    in.eta = eta;
    in.gamma = mu * tau;
    in.alpha = eta * lambda;
    in.spec_w = spec;
    in.spec_p = spec;
    in.j_min = sigma_n2;
    return in;
}

RealVec lambda_px(const AnalysisInput& in) {
    return in.sigma_x2 * in.system.p_o.real();
}

RealVec lambda_wx(const AnalysisInput& in) {
    return in.sigma_x2 * in.system.w_o.cwiseAbs2();
}

StabilityBounds stability_bounds(const RealVec& lpx, const RealVec& lwx) {
    if (lpx.size() == 0 || lwx.size() == 0) throw InvalidArgument("stability_bounds: empty input");
    if ((lpx.array() <= 0.0).any() || (lwx.array() <= 0.0).any()) {
        throw InvalidArgument("stability_bounds: all entries must be strictly positive");
    }
    return {2.0 / lpx.maxCoeff(), 2.0 / lwx.maxCoeff()};
}

double lms_step_bound(double sigma_x2, std::size_t m) {
    if (!(sigma_x2 > 0.0) || m == 0) throw InvalidArgument("lms_step_bound: need sigma_x2 > 0, m >= 1");
    return 2.0 / (sigma_x2 * static_cast<double>(m));
}

namespace {

// Fixed point of K <- (1 - s l)^2 K + s^2 J l + c^2 L for l > 0.
double fixed_point(double step, double lambda, double j, double c, double l_diag) {
    const double gap = 2.0 / step - lambda;
    return j / gap + c * c * l_diag / (step * step * lambda * gap);
}

void check_stable(double step, const RealVec& lambda, const char* name) {
    for (Eigen::Index n = 0; n < lambda.size(); ++n) {
        if (lambda[n] > 0.0 && !(step < 2.0 / lambda[n])) {
            throw UnstableConfiguration(std::string("steady_state: ") + name + " at or above 2/lambda at index " +
                                            std::to_string(n),
                                        static_cast<std::size_t>(n));
        }
    }
}

}  // namespace

double mse_from_diagonals(const AnalysisInput& in, const RealVec& k_w, const RealVec& k_p) {
    const RealVec p_o = in.system.p_o.real();
    const RealVec w2 = in.system.w_o.cwiseAbs2();
    const double cross = k_p.cwiseProduct(k_w).sum();
    const double p_term = p_o.cwiseProduct(w2).cwiseProduct(k_p).sum();
    const double w_term = p_o.cwiseProduct(k_w).sum();
    return in.j_min + in.sigma_x2 * cross + in.sigma_x2 * p_term + in.sigma_x2 * w_term;
}

SteadyState steady_state(const AnalysisInput& in) {
    in.validate();
    SteadyState out;
    out.lambda_px = lambda_px(in);
    out.lambda_wx = lambda_wx(in);
    check_stable(in.mu, out.lambda_px, "mu");
    check_stable(in.eta, out.lambda_wx, "eta");

    const RealVec l_w = l_diagonal(in.spec_w, in.system.w_o);
    const RealVec l_p = l_diagonal(in.spec_p, in.system.p_o);
    const Eigen::Index m = out.lambda_px.size();
    out.k_w = RealVec::Zero(m);
    out.k_p = RealVec::Zero(m);
    for (Eigen::Index n = 0; n < m; ++n) {
        if (out.lambda_px[n] > 0.0) {
            out.k_w[n] = fixed_point(in.mu, out.lambda_px[n], in.j_min, in.gamma, l_w[n]);
        }
        if (out.lambda_wx[n] > 0.0) {
            out.k_p[n] = fixed_point(in.eta, out.lambda_wx[n], in.j_min, in.alpha, l_p[n]);
        }
    }
    out.mse = mse_from_diagonals(in, out.k_w, out.k_p);
    out.mse_db = to_db(out.mse);
    return out;
}

TransientPoint advance(const AnalysisInput& in, const RealVec& k_w, const RealVec& k_p) {
    const RealVec lpx = lambda_px(in);
    const RealVec lwx = lambda_wx(in);
    const RealVec l_w = l_diagonal(in.spec_w, in.system.w_o);
    const RealVec l_p = l_diagonal(in.spec_p, in.system.p_o);

    TransientPoint next;
    next.k_w = RealVec(k_w.size());
    next.k_p = RealVec(k_p.size());
    for (Eigen::Index n = 0; n < k_w.size(); ++n) {
        const double rw = 1.0 - in.mu * lpx[n];
        const double rp = 1.0 - in.eta * lwx[n];
        next.k_w[n] = rw * rw * k_w[n] + in.mu * in.mu * in.j_min * lpx[n] + in.gamma * in.gamma * l_w[n];
        next.k_p[n] = rp * rp * k_p[n] + in.eta * in.eta * in.j_min * lwx[n] + in.alpha * in.alpha * l_p[n];
    }
    next.mse = mse_from_diagonals(in, next.k_w, next.k_p);
    return next;
}

std::vector<TransientPoint> transient_k(const AnalysisInput& in, std::size_t iterations) {
    if (iterations == 0) throw InvalidArgument("transient_k: iterations must be >= 1");
    in.validate();
    std::vector<TransientPoint> seq;
    seq.reserve(iterations + 1);

    TransientPoint start;
    start.k_w = in.system.w_o.cwiseAbs2();
    start.k_p = (ComplexVec::Ones(in.system.p_o.size()) - in.system.p_o).cwiseAbs2();
    start.mse = mse_from_diagonals(in, start.k_w, start.k_p);
    seq.push_back(std::move(start));

    for (std::size_t i = 0; i < iterations; ++i) {
        const TransientPoint& prev = seq.back();
        seq.push_back(advance(in, prev.k_w, prev.k_p));
    }
    return seq;
}

double trace_mse(const ComplexMat& r_x, const ComplexMat& k_w, const ComplexMat& k_p, const ComplexVec& w_o,
                 const ComplexVec& p_o, double j_min) {
    const Eigen::Index m = r_x.rows();
    const bool square = r_x.cols() == m && k_w.rows() == m && k_w.cols() == m && k_p.rows() == m &&
                        k_p.cols() == m && w_o.size() == m && p_o.size() == m;
    if (!square) throw InvalidArgument("trace_mse: all operands must be M x M (vectors of length M)");

    const ComplexMat r_wo = w_o * w_o.adjoint();
    const ComplexMat r_or = p_o * p_o.adjoint();
    const Complex total = (r_x * k_w.cwiseProduct(k_p)).trace() + (r_x * r_wo.cwiseProduct(k_p)).trace() +
                          (r_x * r_or.cwiseProduct(k_w)).trace();
    return j_min + total.real();
}

}  // namespace altlms
