#include "altlms/harness.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <exception>
#include <mutex>
#include <string>
#include <thread>

#include "altlms/mse_analysis.hpp"

namespace altlms {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

class Fnv1a {
public:
    void add(double v) {
        auto bits = std::bit_cast<std::uint64_t>(v);
        for (int i = 0; i < 8; ++i) {
            hash_ ^= (bits >> (8 * i)) & 0xffU;
            hash_ *= 0x100000001b3ULL;
        }
    }
    void add(Complex z) {
        add(z.real());
        add(z.imag());
    }
    std::uint64_t value() const { return hash_; }

private:
    std::uint64_t hash_ = 0xcbf29ce484222325ULL;
};

[[noreturn]] void invalid(const std::string& what) {
    throw InvalidArgument("scenario: " + what);
}

AlgorithmEntry entry(std::string label, AlgorithmKind kind, ShrinkageSpec spec, double mu, double eta, double tau,
                     double lambda) {
    AlgorithmEntry e;
    e.label = std::move(label);
    e.kind = kind;
    e.spec = spec;
    e.mu = mu;
    e.eta = eta;
    e.tau = tau;
    e.lambda = lambda;
    return e;
}

}  // namespace

void Scenario::validate() const {
    if (m == 0) invalid("m must be >= 1");
    if (k_initial == 0 || k_initial > m) invalid("k_initial must satisfy 1 <= k <= m");
    if (iterations == 0) invalid("iterations must be >= 1");
    if (trials == 0) invalid("trials must be >= 1");
    if (k_after_switch.has_value() != switch_iteration.has_value()) {
        invalid("k_after_switch and switch_iteration must be given together");
    }
    if (k_after_switch && (*k_after_switch == 0 || *k_after_switch > m)) {
        invalid("k_after_switch must satisfy 1 <= k <= m");
    }
    if (switch_iteration && *switch_iteration >= iterations) invalid("switch_iteration must be < iterations");
    if (!(sigma_x2 > 0.0)) invalid("sigma_x2 must be > 0");
    if (!std::isfinite(snr_db)) invalid("snr_db must be finite");
    if (input_mode == InputMode::Ar1) {
        if (!(std::abs(ar_coefficient) < 1.0)) invalid("ar_coefficient must satisfy |a| < 1");
        if (regressor_style != RegressorStyle::TappedDelayLine) invalid("ar1 input needs the tapped delay line");
    }
    if (roster.empty()) invalid("roster must contain at least one algorithm");
    for (const auto& e : roster) {
        if (e.label.empty()) invalid("algorithm label must not be empty");
        if (!(e.mu >= 0.0) || !(e.eta >= 0.0) || !(e.tau >= 0.0) || !(e.lambda >= 0.0)) {
            invalid("algorithm '" + e.label + "': mu, eta, tau, lambda must be >= 0");
        }
        e.spec.validate();
    }
    for (std::size_t i = 0; i < roster.size(); ++i) {
        for (std::size_t j = i + 1; j < roster.size(); ++j) {
            if (roster[i].label == roster[j].label) invalid("duplicate algorithm label '" + roster[i].label + "'");
        }
    }
}

Scenario preset_fig2() {
    constexpr double mu = 0.015;
    constexpr double eta = 0.012;
    constexpr double tau = 0.02;
    constexpr double lambda = 0.02;
    const auto logsum = ShrinkageSpec::log_sum(10.0);
    const auto l0 = ShrinkageSpec::l0_approx(10.0);

    Scenario s;
    s.m = 16;
    s.k_initial = 2;
    s.k_after_switch = 4;
    s.switch_iteration = 1000;
    s.iterations = 2000;
    s.trials = 200;
    s.snr_db = 40.0;
    s.sigma_x2 = 1.0;
    s.input_mode = InputMode::Ar1;
    s.ar_coefficient = 0.8;
    s.regressor_style = RegressorStyle::TappedDelayLine;
    s.coeff_mode = CoeffMode::UnitTaps;
    s.base_seed = 20240601;
    s.roster = {
        entry("LMS", AlgorithmKind::Lms, ShrinkageSpec::none(), mu, 0.0, 0.0, 0.0),
        entry("SA-LMS-logsum", AlgorithmKind::SaLms, logsum, mu, 0.0, tau, 0.0),
        entry("SA-LMS-l0", AlgorithmKind::SaLms, l0, mu, 0.0, tau, 0.0),
        entry("SA-ALT-LMS-logsum", AlgorithmKind::SaAltLms, logsum, mu, eta, tau, lambda),
        entry("SA-ALT-LMS-l0", AlgorithmKind::SaAltLms, l0, mu, eta, tau, lambda),
        entry("Oracle-LMS", AlgorithmKind::OracleLms, ShrinkageSpec::none(), mu, 0.0, 0.0, 0.0),
    };
    return s;
}

Scenario preset_fig3() {
    constexpr double step = 0.01;
    constexpr double tau = 0.02;
    constexpr double lambda = 0.02;

    Scenario s;
    s.m = 32;
    s.k_initial = 4;
    s.iterations = 1000;
    s.trials = 200;
    s.snr_db = 30.0;
    s.sigma_x2 = 1.0;
    s.input_mode = InputMode::White;
    s.regressor_style = RegressorStyle::IidVector;
    s.coeff_mode = CoeffMode::ComplexGaussianTaps;
    s.base_seed = 20240602;
    s.roster = {
        entry("SA-ALT-LMS-l1", AlgorithmKind::SaAltLms, ShrinkageSpec::l1(), step, step, tau, lambda),
        entry("SA-ALT-LMS-logsum", AlgorithmKind::SaAltLms, ShrinkageSpec::log_sum(10.0), step, step, tau, lambda),
        entry("SA-ALT-LMS-l0", AlgorithmKind::SaAltLms, ShrinkageSpec::l0_approx(10.0), step, step, tau, lambda),
    };
    return s;
}

std::optional<Scenario> preset_by_name(const std::string& name) {
    if (name == "fig2") return preset_fig2();
    if (name == "fig3") return preset_fig3();
    return std::nullopt;
}

std::uint64_t trial_seed(std::uint64_t base_seed, std::size_t trial_index) {
    return base_seed ^ splitmix64(static_cast<std::uint64_t>(trial_index));
}

SparseSystem trial_system(const Scenario& scenario, std::size_t trial_index) {
    Rng rng(trial_seed(scenario.base_seed, trial_index));
    return generate_sparse_system(scenario.m, scenario.k_initial, scenario.coeff_mode, rng);
}

TrialRealization generate_trial(const Scenario& scenario, std::size_t trial_index) {
    Rng rng(trial_seed(scenario.base_seed, trial_index));
    TrialRealization r;
    // Draw order matters: trial_system() replays the first draw only.
    r.initial = generate_sparse_system(scenario.m, scenario.k_initial, scenario.coeff_mode, rng);
    if (scenario.k_after_switch) {
        r.after_switch = generate_sparse_system(scenario.m, *scenario.k_after_switch, scenario.coeff_mode, rng);
    }

    InputProcess input(scenario.m, scenario.input_config(), rng);
    const double sigma_n2 = scenario.sigma_n2();
    r.regressors.reserve(scenario.iterations);
    r.desired.reserve(scenario.iterations);
    for (std::size_t i = 0; i < scenario.iterations; ++i) {
        const bool switched = scenario.switch_iteration && i >= *scenario.switch_iteration;
        const SparseSystem& sys = switched ? *r.after_switch : r.initial;
        ComplexVec x = input.next_regressor(rng);
        r.desired.push_back(measure(sys, x, sigma_n2, rng).d_noisy);
        r.regressors.push_back(std::move(x));
    }
    return r;
}

FilterState make_filter(const AlgorithmEntry& e, std::size_t m, const std::vector<std::size_t>& support) {
    switch (e.kind) {
        case AlgorithmKind::Lms: return make_lms(m, e.mu);
        case AlgorithmKind::SaLms: return make_sa_lms(m, e.mu, e.mu * e.tau, e.spec);
        case AlgorithmKind::SaAltLms:
            return make_sa_alt_lms(m, e.mu, e.eta, e.mu * e.tau, e.eta * e.lambda, e.spec, e.spec, e.order);
        case AlgorithmKind::OracleLms: return make_oracle_lms(m, e.mu, support);
    }
    throw InvalidArgument("make_filter: unknown algorithm");
}

TrialTrace run_on_realization(const Scenario& scenario, const AlgorithmEntry& e, const TrialRealization& r) {
    FilterState state = make_filter(e, scenario.m, r.initial.support);
    TrialTrace trace;
    trace.squared_error.reserve(r.regressors.size());
    Fnv1a checksum;

    for (std::size_t i = 0; i < r.regressors.size(); ++i) {
        if (scenario.switch_iteration && i == *scenario.switch_iteration && e.kind == AlgorithmKind::OracleLms) {
            set_oracle_support(state, r.after_switch->support);
        }
        const ComplexVec& x = r.regressors[i];
        for (Eigen::Index n = 0; n < x.size(); ++n) checksum.add(x[n]);
        checksum.add(r.desired[i]);

        const StepOutput out = step(state, x, r.desired[i]);
        if (diverged(state, out)) {
            trace.diverged = true;
            break;
        }
        trace.squared_error.push_back(out.squared_error);
    }
    trace.stream_checksum = checksum.value();
    return trace;
}

TrialTrace run_trial(const Scenario& scenario, const AlgorithmEntry& e, std::size_t trial_index) {
    scenario.validate();
    return run_on_realization(scenario, e, generate_trial(scenario, trial_index));
}

std::vector<TrialTrace> run_trial_roster(const Scenario& scenario, std::size_t trial_index) {
    const TrialRealization r = generate_trial(scenario, trial_index);
    std::vector<TrialTrace> traces;
    traces.reserve(scenario.roster.size());
    for (const auto& e : scenario.roster) traces.push_back(run_on_realization(scenario, e, r));
    return traces;
}

std::vector<std::vector<TrialTrace>> run_all_trials(const Scenario& scenario, const RunOptions& options) {
    scenario.validate();
    std::vector<std::vector<TrialTrace>> traces(scenario.trials);
    const unsigned workers = std::max(1U, std::min<unsigned>(options.threads, static_cast<unsigned>(scenario.trials)));

    if (workers == 1) {
        for (std::size_t t = 0; t < scenario.trials; ++t) traces[t] = run_trial_roster(scenario, t);
        return traces;
    }

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto work = [&] {
        for (std::size_t t = next++; t < scenario.trials; t = next++) {
            try {
                traces[t] = run_trial_roster(scenario, t);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    pool.clear();  // joins
    if (failure) std::rethrow_exception(failure);
    return traces;
}

std::vector<LearningCurve> average_traces(const Scenario& scenario,
                                          const std::vector<std::vector<TrialTrace>>& traces) {
    std::vector<LearningCurve> curves;
    curves.reserve(scenario.roster.size());
    for (std::size_t a = 0; a < scenario.roster.size(); ++a) {
        LearningCurve curve;
        curve.label = scenario.roster[a].label;
        std::vector<double> sum(scenario.iterations, 0.0);
        std::size_t used = 0;
        for (const auto& trial : traces) {
            const TrialTrace& tr = trial[a];
            if (tr.diverged) {
                ++curve.diverged_trial_count;
                continue;
            }
            for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += tr.squared_error[i];
            ++used;
        }
        if (used > 0) {
            curve.mse_per_iteration.resize(sum.size());
            curve.mse_db_per_iteration.resize(sum.size());
            for (std::size_t i = 0; i < sum.size(); ++i) {
                curve.mse_per_iteration[i] = sum[i] / static_cast<double>(used);
                curve.mse_db_per_iteration[i] = to_db(curve.mse_per_iteration[i]);
            }
        }
        curves.push_back(std::move(curve));
    }
    return curves;
}

std::vector<LearningCurve> run_experiment(const Scenario& scenario, const RunOptions& options) {
    return average_traces(scenario, run_all_trials(scenario, options));
}

std::pair<std::size_t, std::size_t> steady_state_window(const Scenario& scenario) {
    const std::size_t end = scenario.switch_iteration.value_or(scenario.iterations);
    const std::size_t len = std::max<std::size_t>(1, end / 10);
    return {end - len, end};
}

double window_mean(const std::vector<double>& values, std::size_t begin, std::size_t end) {
    if (begin >= end || end > values.size()) throw InvalidArgument("window_mean: bad window");
    double sum = 0.0;
    for (std::size_t i = begin; i < end; ++i) sum += values[i];
    return sum / static_cast<double>(end - begin);
}

SweepTable sweep_step_size(const Scenario& scenario, std::span<const double> grid, bool mu_equals_eta,
                           const RunOptions& options) {
    scenario.validate();
    if (scenario.input_mode != InputMode::White) {
        throw InvalidArgument("sweep_step_size: the analytical model needs white input");
    }
    if (grid.empty()) throw InvalidArgument("sweep_step_size: empty grid");
    for (double g : grid) {
        if (!(g > 0.0)) throw InvalidArgument("sweep_step_size: grid entries must be > 0");
    }

    SweepTable table;
    for (const auto& e : scenario.roster) table.labels.push_back(e.label);

    std::vector<SparseSystem> systems;
    systems.reserve(scenario.trials);
    for (std::size_t t = 0; t < scenario.trials; ++t) systems.push_back(trial_system(scenario, t));

    const auto [begin, end] = steady_state_window(scenario);
    for (double stepsize : grid) {
        Scenario point = scenario;
        for (auto& e : point.roster) {
            e.mu = stepsize;
            if (mu_equals_eta) e.eta = stepsize;
        }
        const auto curves = run_experiment(point, options);

        SweepRow row;
        row.step = stepsize;
        for (std::size_t a = 0; a < point.roster.size(); ++a) {
            const AlgorithmEntry& e = point.roster[a];
            SweepCell cell;
            cell.diverged = curves[a].diverged_trial_count > 0;
            if (!curves[a].all_diverged()) cell.simulated_mse = window_mean(curves[a].mse_per_iteration, begin, end);

            if (e.kind == AlgorithmKind::SaAltLms) {
                try {
                    double sum = 0.0;
                    for (const auto& sys : systems) {
                        sum += steady_state(make_analysis_input(sys, point.sigma_x2, point.sigma_n2(), e.mu, e.eta,
                                                                e.tau, e.lambda, e.spec))
                                   .mse;
                    }
                    cell.analytical_mse = sum / static_cast<double>(systems.size());
                } catch (const UnstableConfiguration&) {
                    cell.unstable = true;
                }
            }
            row.cells.push_back(cell);
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

}  // namespace altlms
