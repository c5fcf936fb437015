#include "altlms/filters.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

namespace altlms {

namespace {

void check_step_size(double v, const char* name) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
        throw InvalidArgument(std::string("filter: ") + name + " must be finite and >= 0");
    }
}

FilterState base_state(AlgorithmKind kind, std::size_t m, double mu) {
    if (m == 0) throw InvalidArgument("filter: m must be >= 1");
    check_step_size(mu, "mu");
    FilterState s;
    s.kind = kind;
    s.w = ComplexVec::Zero(static_cast<Eigen::Index>(m));
    s.p = ComplexVec::Ones(static_cast<Eigen::Index>(m));
    s.mu = mu;
    return s;
}

void check_inputs(const FilterState& state, const ComplexVec& x, Complex d) {
    require_same_length(state.w, x, "filter step");
    if (!x.allFinite() || !std::isfinite(d.real()) || !std::isfinite(d.imag())) {
        throw NumericFault("filter step: non-finite regressor or desired sample", state.iteration);
    }
}

StepOutput make_output(Complex d_noisy, Complex d_hat) {
    StepOutput out;
    out.d_hat = d_hat;
    out.error = d_noisy - d_hat;
    out.squared_error = std::norm(out.error);
    return out;
}

// w <- w + mu e* (p o x) - gamma f'(w)
void adapt_w(FilterState& s, const ComplexVec& masked_x, Complex e) {
    if (s.gamma != 0.0) {
        s.w += s.mu * std::conj(e) * masked_x - s.gamma * subgradient(s.spec_w, s.w);
    } else {
        s.w += s.mu * std::conj(e) * masked_x;
    }
}

}  // namespace

std::string to_string(AlgorithmKind kind) {
    switch (kind) {
        case AlgorithmKind::Lms: return "lms";
        case AlgorithmKind::SaLms: return "sa-lms";
        case AlgorithmKind::SaAltLms: return "sa-alt-lms";
        case AlgorithmKind::OracleLms: return "oracle-lms";
    }
    return "lms";
}

AlgorithmKind algorithm_from_string(const std::string& name) {
    std::string n;
    for (char c : name) n.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    std::replace(n.begin(), n.end(), '_', '-');
    if (n == "lms") return AlgorithmKind::Lms;
    if (n == "sa-lms" || n == "salms") return AlgorithmKind::SaLms;
    if (n == "sa-alt-lms" || n == "saaltlms") return AlgorithmKind::SaAltLms;
    if (n == "oracle-lms" || n == "oracle") return AlgorithmKind::OracleLms;
    throw InvalidArgument("unknown algorithm '" + name + "' (expected lms, sa-lms, sa-alt-lms, oracle-lms)");
}

std::string to_string(UpdateOrder order) {
    return order == UpdateOrder::Jacobi ? "jacobi" : "gauss-seidel";
}

UpdateOrder update_order_from_string(const std::string& name) {
    if (name == "jacobi") return UpdateOrder::Jacobi;
    if (name == "gauss-seidel" || name == "gauss_seidel") return UpdateOrder::GaussSeidel;
    throw InvalidArgument("unknown update order '" + name + "' (expected jacobi, gauss-seidel)");
}

FilterState make_lms(std::size_t m, double mu) {
    return base_state(AlgorithmKind::Lms, m, mu);
}

FilterState make_sa_lms(std::size_t m, double mu, double gamma, const ShrinkageSpec& spec) {
    spec.validate();
    check_step_size(gamma, "gamma");
    FilterState s = base_state(AlgorithmKind::SaLms, m, mu);
    s.gamma = gamma;
    s.spec_w = spec;
    return s;
}

FilterState make_sa_alt_lms(std::size_t m, double mu, double eta, double gamma, double alpha,
                            const ShrinkageSpec& spec_w, const ShrinkageSpec& spec_p, UpdateOrder order) {
    spec_w.validate();
    spec_p.validate();
    check_step_size(eta, "eta");
    check_step_size(gamma, "gamma");
    check_step_size(alpha, "alpha");
    FilterState s = base_state(AlgorithmKind::SaAltLms, m, mu);
    s.eta = eta;
    s.gamma = gamma;
    s.alpha = alpha;
    s.spec_w = spec_w;
    s.spec_p = spec_p;
    s.order = order;
    return s;
}

FilterState make_oracle_lms(std::size_t m, double mu, const std::vector<std::size_t>& support) {
    FilterState s = base_state(AlgorithmKind::OracleLms, m, mu);
    set_oracle_support(s, support);
    return s;
}

void set_oracle_support(FilterState& state, const std::vector<std::size_t>& support) {
    state.p = ComplexVec::Zero(state.w.size());
    for (std::size_t n : support) {
        if (n >= state.m()) throw InvalidArgument("set_oracle_support: index out of range");
        state.p[static_cast<Eigen::Index>(n)] = 1.0;
    }
    state.w = state.w.cwiseProduct(state.p);
    state.oracle_support = support;
}

Complex predict(const FilterState& state, const ComplexVec& x) {
    require_same_length(state.w, x, "predict");
    return state.w.dot(state.p.cwiseProduct(x));
}

StepOutput lms_step(FilterState& state, const ComplexVec& x, Complex d_noisy) {
    check_inputs(state, x, d_noisy);
    const StepOutput out = make_output(d_noisy, state.w.dot(x));
    state.w += state.mu * std::conj(out.error) * x;
    ++state.iteration;
    return out;
}

StepOutput sa_lms_step(FilterState& state, const ComplexVec& x, Complex d_noisy) {
    check_inputs(state, x, d_noisy);
    const StepOutput out = make_output(d_noisy, state.w.dot(x));
    adapt_w(state, x, out.error);
    ++state.iteration;
    return out;
}

StepOutput sa_alt_lms_step(FilterState& state, const ComplexVec& x, Complex d_noisy) {
    check_inputs(state, x, d_noisy);
    const ComplexVec px = state.p.cwiseProduct(x);
    const StepOutput out = make_output(d_noisy, state.w.dot(px));
    const Complex e = out.error;

    // p <- p + eta e (w o x*) - alpha f'(p)
    ComplexVec p_next = state.p;
    if (state.eta != 0.0) p_next += state.eta * e * state.w.cwiseProduct(x.conjugate());
    if (state.alpha != 0.0) p_next -= state.alpha * subgradient(state.spec_p, state.p);

    if (state.order == UpdateOrder::Jacobi) {
        adapt_w(state, px, e);
    } else {
        const ComplexVec px_next = p_next.cwiseProduct(x);
        adapt_w(state, px_next, d_noisy - state.w.dot(px_next));
    }
    state.p = std::move(p_next);
    ++state.iteration;
    return out;
}

StepOutput oracle_lms_step(FilterState& state, const ComplexVec& x, Complex d_noisy) {
    check_inputs(state, x, d_noisy);
    const ComplexVec px = state.p.cwiseProduct(x);
    const StepOutput out = make_output(d_noisy, state.w.dot(px));
    state.w += state.mu * std::conj(out.error) * px;
    ++state.iteration;
    return out;
}

StepOutput step(FilterState& state, const ComplexVec& x, Complex d_noisy) {
    switch (state.kind) {
        case AlgorithmKind::Lms: return lms_step(state, x, d_noisy);
        case AlgorithmKind::SaLms: return sa_lms_step(state, x, d_noisy);
        case AlgorithmKind::SaAltLms: return sa_alt_lms_step(state, x, d_noisy);
        case AlgorithmKind::OracleLms: return oracle_lms_step(state, x, d_noisy);
    }
    throw InvalidArgument("step: unknown algorithm");
}

bool diverged(const FilterState& state, const StepOutput& out) {
    return !(out.squared_error <= kDivergenceThreshold) || !state.w.allFinite() || !state.p.allFinite();
}

OpCount algorithm_cost(AlgorithmKind kind, const ShrinkageSpec& spec, std::size_t m) {
    if (m == 0) throw InvalidArgument("algorithm_cost: m must be >= 1");
    const auto mm = static_cast<long long>(m);
    switch (kind) {
        case AlgorithmKind::Lms: return {2 * mm, 2 * mm, 0};
        case AlgorithmKind::SaLms: return OpCount{2 * mm, 2 * mm, 0} + 2 * shrinkage_cost(spec, m);
        case AlgorithmKind::SaAltLms: return OpCount{5 * mm, 7 * mm, 0} + 2 * shrinkage_cost(spec, m);
        case AlgorithmKind::OracleLms: break;
    }
    throw InvalidArgument("algorithm_cost: no tabulated cost for oracle-lms");
}

}  // namespace altlms
