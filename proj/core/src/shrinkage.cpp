#include "altlms/shrinkage.hpp"

#include <cmath>

namespace altlms {

namespace {

double sgn(double v) {
    return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0);
}

// a/|a| with 0 at the origin.
Complex unit_phase(Complex a) {
    const double mag = std::abs(a);
    return mag > 0.0 ? a / mag : Complex{0.0, 0.0};
}

bool in_l0_region(const ShrinkageSpec& spec, Complex a) {
    return std::abs(a) <= 1.0 / spec.beta;
}

}  // namespace

void ShrinkageSpec::validate() const {
    if (kind == PenaltyKind::LogSum && !(epsilon > 0.0)) {
        throw InvalidArgument("ShrinkageSpec: LogSum requires epsilon > 0");
    }
    if (kind == PenaltyKind::L0Approx && !(beta > 0.0)) {
        throw InvalidArgument("ShrinkageSpec: L0Approx requires beta > 0");
    }
}

std::string to_string(PenaltyKind kind) {
    switch (kind) {
        case PenaltyKind::None: return "none";
        case PenaltyKind::L1: return "l1";
        case PenaltyKind::LogSum: return "logsum";
        case PenaltyKind::L0Approx: return "l0";
    }
    return "none";
}

PenaltyKind penalty_from_string(const std::string& name) {
    if (name == "none") return PenaltyKind::None;
    if (name == "l1") return PenaltyKind::L1;
    if (name == "logsum" || name == "log-sum") return PenaltyKind::LogSum;
    if (name == "l0" || name == "l0approx") return PenaltyKind::L0Approx;
    throw InvalidArgument("unknown penalty '" + name + "' (expected none, l1, logsum, l0)");
}

Complex csign(Complex z) {
    return {sgn(z.real()), sgn(z.imag())};
}

double penalty_value(const ShrinkageSpec& spec, const ComplexVec& a) {
    double total = 0.0;
    for (Eigen::Index n = 0; n < a.size(); ++n) {
        const double mag = std::abs(a[n]);
        switch (spec.kind) {
            case PenaltyKind::None: break;
            case PenaltyKind::L1: total += mag; break;
            case PenaltyKind::LogSum: total += std::log1p(mag / spec.epsilon); break;
            case PenaltyKind::L0Approx: total += -std::expm1(-spec.beta * mag); break;
        }
    }
    return total;
}

ComplexVec subgradient(const ShrinkageSpec& spec, const ComplexVec& a) {
    ComplexVec g = ComplexVec::Zero(a.size());
    switch (spec.kind) {
        case PenaltyKind::None:
            break;
        case PenaltyKind::L1:
            for (Eigen::Index n = 0; n < a.size(); ++n) g[n] = csign(a[n]);
            break;
        case PenaltyKind::LogSum:
            if (spec.exact_logsum_gradient) {
                for (Eigen::Index n = 0; n < a.size(); ++n) {
                    g[n] = unit_phase(a[n]) / (spec.epsilon + std::abs(a[n]));
                }
            } else {
                const double denom = 1.0 + spec.epsilon * a.cwiseAbs().sum();
                for (Eigen::Index n = 0; n < a.size(); ++n) g[n] = csign(a[n]) / denom;
            }
            break;
        case PenaltyKind::L0Approx: {
            const double b = spec.beta;
            for (Eigen::Index n = 0; n < a.size(); ++n) {
                if (in_l0_region(spec, a[n])) g[n] = b * csign(a[n]) - b * b * a[n];
            }
            break;
        }
    }
    return g;
}

ComplexVec wirtinger_gradient(const ShrinkageSpec& spec, const ComplexVec& a) {
    ComplexVec g = ComplexVec::Zero(a.size());
    for (Eigen::Index n = 0; n < a.size(); ++n) {
        const double mag = std::abs(a[n]);
        const Complex half_phase = 0.5 * unit_phase(a[n]);
        switch (spec.kind) {
            case PenaltyKind::None: break;
            case PenaltyKind::L1: g[n] = half_phase; break;
            case PenaltyKind::LogSum: g[n] = half_phase / (spec.epsilon + mag); break;
            case PenaltyKind::L0Approx: g[n] = spec.beta * std::exp(-spec.beta * mag) * half_phase; break;
        }
    }
    return g;
}

ComplexMat l_matrix(const ShrinkageSpec& spec, const ComplexVec& a_opt) {
    const Eigen::Index m = a_opt.size();
    ComplexVec s(m);
    for (Eigen::Index n = 0; n < m; ++n) s[n] = csign(a_opt[n]);

    switch (spec.kind) {
        case PenaltyKind::None:
            return ComplexMat::Zero(m, m);
        case PenaltyKind::L1:
            return s * s.adjoint();
        case PenaltyKind::LogSum: {
            ComplexVec t(m);
            for (Eigen::Index n = 0; n < m; ++n) t[n] = s[n] / (1.0 + spec.epsilon * std::abs(a_opt[n]));
            return t * t.adjoint();
        }
        case PenaltyKind::L0Approx: {
            ComplexVec a = a_opt;
            for (Eigen::Index n = 0; n < m; ++n) {
                if (!in_l0_region(spec, a_opt[n])) {
                    s[n] = 0.0;
                    a[n] = 0.0;
                }
            }
            const double b = spec.beta;
            return (b * b) * (s * s.adjoint()) - (b * b * b) * (s * a.adjoint()) -
                   (b * b * b) * (a * s.adjoint()) + (b * b * b * b) * (a * a.adjoint());
        }
    }
    return ComplexMat::Zero(m, m);
}

RealVec l_diagonal(const ShrinkageSpec& spec, const ComplexVec& a_opt) {
    const Eigen::Index m = a_opt.size();
    RealVec d = RealVec::Zero(m);
    for (Eigen::Index n = 0; n < m; ++n) {
        const Complex s = csign(a_opt[n]);
        switch (spec.kind) {
            case PenaltyKind::None: break;
            case PenaltyKind::L1: d[n] = std::norm(s); break;
            case PenaltyKind::LogSum: {
                const double damp = 1.0 + spec.epsilon * std::abs(a_opt[n]);
                d[n] = std::norm(s) / (damp * damp);
                break;
            }
            case PenaltyKind::L0Approx:
                if (in_l0_region(spec, a_opt[n])) {
                    d[n] = std::norm(spec.beta * s - spec.beta * spec.beta * a_opt[n]);
                }
                break;
        }
    }
    return d;
}

OpCount shrinkage_cost(const ShrinkageSpec& spec, std::size_t m) {
    if (m == 0) throw InvalidArgument("shrinkage_cost: m must be >= 1");
    const auto mm = static_cast<long long>(m);
    switch (spec.kind) {
        case PenaltyKind::None: return {};
        case PenaltyKind::L1: return {2 * mm, 4 * mm, 2 * mm};
        case PenaltyKind::LogSum: return {4 * mm, 7 * mm, 3 * mm};
        case PenaltyKind::L0Approx: return {3 * mm, 6 * mm, 2 * mm};
    }
    return {};
}

}  // namespace altlms
