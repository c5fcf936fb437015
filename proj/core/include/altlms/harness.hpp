#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "altlms/filters.hpp"
#include "altlms/signal_model.hpp"

namespace altlms {

/// One roster entry: an algorithm with its penalty, step sizes and
/// regularization weights (gamma = mu*tau, alpha = eta*lambda).
struct AlgorithmEntry {
    std::string label;
    AlgorithmKind kind = AlgorithmKind::Lms;
    ShrinkageSpec spec;
    double mu = 0.0;
    double eta = 0.0;
    double tau = 0.0;
    double lambda = 0.0;
    UpdateOrder order = UpdateOrder::Jacobi;

    bool operator==(const AlgorithmEntry&) const = default;
};

struct Scenario {
    std::size_t m = 16;
    std::size_t k_initial = 2;
    std::optional<std::size_t> k_after_switch;
    std::optional<std::size_t> switch_iteration;
    std::size_t iterations = 1000;
    std::size_t trials = 1;
    double snr_db = 30.0;
    double sigma_x2 = 1.0;
    InputMode input_mode = InputMode::White;
    double ar_coefficient = 0.8;
    RegressorStyle regressor_style = RegressorStyle::TappedDelayLine;
    CoeffMode coeff_mode = CoeffMode::UnitTaps;
    std::vector<AlgorithmEntry> roster;
    std::uint64_t base_seed = 1;

    /// Throws InvalidArgument naming the violated invariant.
    void validate() const;

    double sigma_n2() const { return noise_variance_for_snr(snr_db, sigma_x2); }
    InputConfig input_config() const { return {input_mode, ar_coefficient, regressor_style, sigma_x2}; }

    bool operator==(const Scenario&) const = default;
};

/// Correlated input, M=16, K=2 -> 4 at iteration 1000, SNR 40 dB,
/// mu=0.015, eta=0.012, tau=lambda=0.02, eps=beta=10, 200 trials.
Scenario preset_fig2();
/// White input, M=32, K=4, SNR 30 dB, tau=lambda=0.02, eps=beta=10,
/// SA-ALT-LMS with each penalty, 200 trials of 1000 iterations.
Scenario preset_fig3();

/// Scenario for a preset name ("fig2", "fig3"); nullopt when unknown.
std::optional<Scenario> preset_by_name(const std::string& name);

std::uint64_t trial_seed(std::uint64_t base_seed, std::size_t trial_index);

/// Everything random in one trial. All roster entries consume the same
/// realization.
struct TrialRealization {
    SparseSystem initial;
    std::optional<SparseSystem> after_switch;
    std::vector<ComplexVec> regressors;
    std::vector<Complex> desired;  // noisy
};

TrialRealization generate_trial(const Scenario& scenario, std::size_t trial_index);

/// The initial system of a trial, without generating its streams.
SparseSystem trial_system(const Scenario& scenario, std::size_t trial_index);

FilterState make_filter(const AlgorithmEntry& entry, std::size_t m, const std::vector<std::size_t>& support);

struct TrialTrace {
    std::vector<double> squared_error;  // truncated at divergence
    bool diverged = false;
    std::uint64_t stream_checksum = 0;  // over the (x, d) pairs the filter consumed
};

TrialTrace run_on_realization(const Scenario& scenario, const AlgorithmEntry& entry,
                              const TrialRealization& realization);

TrialTrace run_trial(const Scenario& scenario, const AlgorithmEntry& entry, std::size_t trial_index);

/// Runs every roster entry on one shared realization.
std::vector<TrialTrace> run_trial_roster(const Scenario& scenario, std::size_t trial_index);

struct LearningCurve {
    std::string label;
    std::vector<double> mse_per_iteration;     // empty when every trial diverged
    std::vector<double> mse_db_per_iteration;
    std::size_t diverged_trial_count = 0;

    bool all_diverged() const { return mse_per_iteration.empty(); }
};

struct RunOptions {
    unsigned threads = 1;
};

/// Per-trial traces for every roster entry, indexed [trial][entry].
std::vector<std::vector<TrialTrace>> run_all_trials(const Scenario& scenario, const RunOptions& options = {});

/// Averages per-trial traces over non-diverged trials, in trial order.
std::vector<LearningCurve> average_traces(const Scenario& scenario,
                                          const std::vector<std::vector<TrialTrace>>& traces);

std::vector<LearningCurve> run_experiment(const Scenario& scenario, const RunOptions& options = {});

/// [begin, end): the final 10% of iterations before any switch.
std::pair<std::size_t, std::size_t> steady_state_window(const Scenario& scenario);

double window_mean(const std::vector<double>& values, std::size_t begin, std::size_t end);

struct SweepCell {
    std::optional<double> simulated_mse;   // nullopt when every trial diverged
    std::optional<double> analytical_mse;  // nullopt when not applicable or unstable
    bool diverged = false;                 // at least one trial diverged
    bool unstable = false;                 // analytical step-size bound violated
};

struct SweepRow {
    double step = 0.0;
    std::vector<SweepCell> cells;  // one per roster entry
};

struct SweepTable {
    std::vector<std::string> labels;
    std::vector<SweepRow> rows;
};

/// For each grid point sets mu (and eta, when mu_equals_eta) of every roster
/// entry, runs the experiment and pairs its steady-state MSE with the
/// analytical prediction averaged over the same trial systems. Only
/// SA-ALT-LMS entries get an analytical value.
SweepTable sweep_step_size(const Scenario& scenario, std::span<const double> grid, bool mu_equals_eta,
                           const RunOptions& options = {});

}  // namespace altlms
