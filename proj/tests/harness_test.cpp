#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "altlms/harness.hpp"
#include "altlms/mse_analysis.hpp"

using namespace altlms;

namespace {

AlgorithmEntry make_entry(std::string label, AlgorithmKind kind, double mu, double eta = 0.0,
                          ShrinkageSpec spec = ShrinkageSpec::log_sum(10.0), double tau = 0.0,
                          double lambda = 0.0) {
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

Scenario small_scenario() {
    Scenario s;
    s.m = 8;
    s.k_initial = 2;
    s.iterations = 300;
    s.trials = 12;
    s.snr_db = 30.0;
    s.base_seed = 99;
    s.roster = {make_entry("LMS", AlgorithmKind::Lms, 0.03),
                make_entry("SA-LMS", AlgorithmKind::SaLms, 0.03, 0.0, ShrinkageSpec::l1(), 0.01),
                make_entry("SA-ALT-LMS", AlgorithmKind::SaAltLms, 0.03, 0.03, ShrinkageSpec::l1(), 0.01, 0.01),
                make_entry("Oracle-LMS", AlgorithmKind::OracleLms, 0.03)};
    return s;
}

}  // namespace

TEST(Presets, Fig2Values) {
    const Scenario s = preset_fig2();
    EXPECT_EQ(s.m, 16u);
    EXPECT_EQ(s.k_initial, 2u);
    EXPECT_EQ(s.k_after_switch, 4u);
    EXPECT_EQ(s.switch_iteration, 1000u);
    EXPECT_EQ(s.snr_db, 40.0);
    EXPECT_EQ(s.input_mode, InputMode::Ar1);
    EXPECT_EQ(s.trials, 200u);
    ASSERT_EQ(s.roster.size(), 6u);
    for (const auto& e : s.roster) {
        EXPECT_EQ(e.mu, 0.015);
        if (e.kind == AlgorithmKind::SaAltLms) {
            EXPECT_EQ(e.eta, 0.012);
            EXPECT_EQ(e.lambda, 0.02);
        }
        if (e.kind == AlgorithmKind::SaLms || e.kind == AlgorithmKind::SaAltLms) EXPECT_EQ(e.tau, 0.02);
    }
    EXPECT_NO_THROW(s.validate());
}

TEST(Presets, Fig3ValuesAndLookup) {
    const Scenario s = preset_fig3();
    EXPECT_EQ(s.m, 32u);
    EXPECT_EQ(s.k_initial, 4u);
    EXPECT_EQ(s.snr_db, 30.0);
    EXPECT_EQ(s.input_mode, InputMode::White);
    EXPECT_EQ(s.iterations, 1000u);
    ASSERT_EQ(s.roster.size(), 3u);
    std::set<PenaltyKind> kinds;
    for (const auto& e : s.roster) {
        EXPECT_EQ(e.kind, AlgorithmKind::SaAltLms);
        kinds.insert(e.spec.kind);
    }
    EXPECT_EQ(kinds.size(), 3u);
    EXPECT_EQ(preset_by_name("fig3"), s);
    EXPECT_EQ(preset_by_name("fig2"), preset_fig2());
    EXPECT_FALSE(preset_by_name("fig9").has_value());
}

TEST(Scenario, ValidationErrors) {
    auto bad = [](auto mutate) {
        Scenario s = small_scenario();
        mutate(s);
        EXPECT_THROW(s.validate(), InvalidArgument);
    };
    bad([](Scenario& s) { s.k_initial = 9; });
    bad([](Scenario& s) { s.k_initial = 0; });
    bad([](Scenario& s) { s.iterations = 0; });
    bad([](Scenario& s) { s.trials = 0; });
    bad([](Scenario& s) { s.switch_iteration = 10; });
    bad([](Scenario& s) {
        s.switch_iteration = 300;
        s.k_after_switch = 2;
    });
    bad([](Scenario& s) { s.roster.clear(); });
    bad([](Scenario& s) { s.roster[1].label = "LMS"; });
    bad([](Scenario& s) { s.roster[0].mu = -1.0; });
    bad([](Scenario& s) {
        s.input_mode = InputMode::Ar1;
        s.ar_coefficient = 1.0;
    });
    EXPECT_NO_THROW(small_scenario().validate());
}

TEST(Seeds, DistinctPerTrialAndStable) {
    std::set<std::uint64_t> seen;
    for (std::size_t t = 0; t < 1000; ++t) seen.insert(trial_seed(5, t));
    EXPECT_EQ(seen.size(), 1000u);
    EXPECT_EQ(trial_seed(5, 17), trial_seed(5, 17));
    EXPECT_NE(trial_seed(5, 17), trial_seed(6, 17));
}

TEST(Trials, DeterministicForFixedSeed) {
    const Scenario s = small_scenario();
    for (const auto& e : s.roster) {
        const auto a = run_trial(s, e, 3);
        const auto b = run_trial(s, e, 3);
        EXPECT_EQ(a.squared_error, b.squared_error);
        EXPECT_EQ(a.stream_checksum, b.stream_checksum);
    }
    EXPECT_NE(run_trial(s, s.roster[0], 3).squared_error, run_trial(s, s.roster[0], 4).squared_error);
}

TEST(Trials, RosterSharesRandomStreams) {
    const Scenario s = small_scenario();
    const auto traces = run_trial_roster(s, 2);
    ASSERT_EQ(traces.size(), s.roster.size());
    for (const auto& t : traces) {
        EXPECT_EQ(t.stream_checksum, traces[0].stream_checksum);
        EXPECT_EQ(t.squared_error.size(), s.iterations);
    }
    // The first error is d[0] for every filter since all start at w = 0.
    for (const auto& t : traces) EXPECT_EQ(t.squared_error[0], traces[0].squared_error[0]);
}

TEST(Trials, RealizationShapes) {
    Scenario s = small_scenario();
    s.k_after_switch = 5;
    s.switch_iteration = 150;
    const auto r = generate_trial(s, 0);
    EXPECT_EQ(r.regressors.size(), s.iterations);
    EXPECT_EQ(r.desired.size(), s.iterations);
    EXPECT_EQ(r.initial.support.size(), 2u);
    ASSERT_TRUE(r.after_switch.has_value());
    EXPECT_EQ(r.after_switch->support.size(), 5u);
    EXPECT_EQ(trial_system(s, 0).support, r.initial.support);
    // Desired samples follow the switched system after the switch point.
    const Complex clean_after = r.after_switch->w_o.dot(r.regressors[200]);
    const Complex clean_before = r.initial.w_o.dot(r.regressors[200]);
    EXPECT_LT(std::abs(r.desired[200] - clean_after), std::abs(r.desired[200] - clean_before) + 0.5);
}

TEST(Experiment, SingleTrialEqualsRunTrial) {
    Scenario s = small_scenario();
    s.trials = 1;
    const auto curves = run_experiment(s);
    ASSERT_EQ(curves.size(), s.roster.size());
    for (std::size_t e = 0; e < s.roster.size(); ++e) {
        EXPECT_EQ(curves[e].label, s.roster[e].label);
        EXPECT_EQ(curves[e].mse_per_iteration, run_trial(s, s.roster[e], 0).squared_error);
    }
}

TEST(Experiment, AverageIsTrialMean) {
    const Scenario s = small_scenario();
    const auto traces = run_all_trials(s);
    const auto curves = average_traces(s, traces);
    for (std::size_t e = 0; e < s.roster.size(); ++e) {
        for (std::size_t i : {0u, 1u, 57u, 299u}) {
            double sum = 0.0;
            for (std::size_t t = 0; t < s.trials; ++t) sum += traces[t][e].squared_error[i];
            EXPECT_NEAR(curves[e].mse_per_iteration[i], sum / double(s.trials), 1e-15);
            EXPECT_NEAR(curves[e].mse_db_per_iteration[i], to_db(curves[e].mse_per_iteration[i]), 1e-12);
        }
    }
}

TEST(Experiment, ThreadCountDoesNotChangeResults) {
    const Scenario s = small_scenario();
    const auto one = run_experiment(s, {1});
    const auto four = run_experiment(s, {4});
    for (std::size_t e = 0; e < one.size(); ++e) EXPECT_EQ(one[e].mse_per_iteration, four[e].mse_per_iteration);
}

TEST(Experiment, DivergedTrialsAreExcluded) {
    Scenario s = small_scenario();
    s.roster = {make_entry("wild", AlgorithmKind::Lms, 1.5), make_entry("calm", AlgorithmKind::Lms, 0.02)};
    const auto traces = run_all_trials(s);
    for (const auto& trial : traces) {
        EXPECT_TRUE(trial[0].diverged);
        EXPECT_LT(trial[0].squared_error.size(), s.iterations);
        EXPECT_FALSE(trial[1].diverged);
    }
    const auto curves = average_traces(s, traces);
    EXPECT_TRUE(curves[0].all_diverged());
    EXPECT_EQ(curves[0].diverged_trial_count, s.trials);
    EXPECT_FALSE(curves[1].all_diverged());
}

TEST(Experiment, OracleFollowsSupportSwitch) {
    Scenario s = small_scenario();
    s.iterations = 1200;
    s.k_after_switch = 4;
    s.switch_iteration = 600;
    s.snr_db = 40.0;
    s.trials = 20;
    s.roster = {make_entry("Oracle-LMS", AlgorithmKind::OracleLms, 0.05)};
    const auto curve = run_experiment(s)[0];
    const double before = window_mean(curve.mse_per_iteration, 500, 600);
    const double spike = window_mean(curve.mse_per_iteration, 600, 610);
    const double after = window_mean(curve.mse_per_iteration, 1100, 1200);
    EXPECT_GT(spike, 100.0 * before);
    EXPECT_LT(to_db(after), -35.0);
}

TEST(Experiment, Fig2SaAltLmsLearnsWithinOneTrial) {
    Scenario s = preset_fig2();
    s.trials = 1;
    for (const auto& e : s.roster) {
        if (e.kind != AlgorithmKind::SaAltLms) continue;
        const auto t = run_trial(s, e, 0);
        EXPECT_LT(window_mean(t.squared_error, 980, 1000), window_mean(t.squared_error, 0, 20)) << e.label;
    }
}

TEST(Experiment, VarianceShrinksWithTrialCount) {
    // The spread of the trial-averaged steady-state MSE should drop about 4x
    // when the trial count goes from 25 to 100.
    Scenario s = small_scenario();
    s.iterations = 200;
    s.roster = {make_entry("LMS", AlgorithmKind::Lms, 0.03)};
    auto spread = [&](std::size_t trials) {
        std::vector<double> means;
        for (std::uint64_t batch = 0; batch < 40; ++batch) {
            Scenario b = s;
            b.trials = trials;
            b.base_seed = 1000 + batch * 7919 + trials;
            means.push_back(run_experiment(b)[0].mse_per_iteration[150]);
        }
        const double mean = std::accumulate(means.begin(), means.end(), 0.0) / double(means.size());
        double var = 0.0;
        for (double v : means) var += (v - mean) * (v - mean);
        return var / double(means.size() - 1);
    };
    const double ratio = spread(25) / spread(100);
    EXPECT_GT(ratio, 2.0);
    EXPECT_LT(ratio, 8.0);
}

TEST(Windows, SteadyStateWindow) {
    Scenario s = small_scenario();
    EXPECT_EQ(steady_state_window(s), (std::pair<std::size_t, std::size_t>{270, 300}));
    s.k_after_switch = 3;
    s.switch_iteration = 100;
    EXPECT_EQ(steady_state_window(s), (std::pair<std::size_t, std::size_t>{90, 100}));
    EXPECT_DOUBLE_EQ(window_mean({1.0, 2.0, 3.0, 4.0}, 1, 3), 2.5);
    EXPECT_THROW(window_mean({1.0}, 0, 2), InvalidArgument);
}

TEST(Sweep, SinglePointMatchesExperiment) {
    Scenario s = small_scenario();
    const std::vector<double> grid{0.03};
    const auto table = sweep_step_size(s, grid, true);
    ASSERT_EQ(table.rows.size(), 1u);
    ASSERT_EQ(table.labels.size(), s.roster.size());
    const auto curves = run_experiment(s);
    const auto [b, e] = steady_state_window(s);
    for (std::size_t i = 0; i < s.roster.size(); ++i) {
        ASSERT_TRUE(table.rows[0].cells[i].simulated_mse.has_value());
        EXPECT_NEAR(*table.rows[0].cells[i].simulated_mse, window_mean(curves[i].mse_per_iteration, b, e), 1e-15);
        EXPECT_EQ(table.rows[0].cells[i].analytical_mse.has_value(), s.roster[i].kind == AlgorithmKind::SaAltLms);
    }
}

TEST(Sweep, AnalyticalValueIsMeanOverTrialSystems) {
    Scenario s = small_scenario();
    s.roster = {s.roster[2]};
    const std::vector<double> grid{0.02};
    const auto table = sweep_step_size(s, grid, true);
    double sum = 0.0;
    for (std::size_t t = 0; t < s.trials; ++t) {
        const auto in = make_analysis_input(trial_system(s, t), s.sigma_x2, s.sigma_n2(), 0.02, 0.02,
                                            s.roster[0].tau, s.roster[0].lambda, s.roster[0].spec);
        sum += steady_state(in).mse;
    }
    EXPECT_NEAR(*table.rows[0].cells[0].analytical_mse, sum / double(s.trials), 1e-15);
}

TEST(Sweep, LmsMisadjustmentGrowsWithStep) {
    Scenario s = small_scenario();
    s.iterations = 2000;
    s.trials = 40;
    s.roster = {make_entry("LMS", AlgorithmKind::Lms, 0.0)};
    const std::vector<double> grid{0.01, 0.04, 0.1};
    const auto table = sweep_step_size(s, grid, false);
    EXPECT_LT(*table.rows[0].cells[0].simulated_mse, *table.rows[1].cells[0].simulated_mse);
    EXPECT_LT(*table.rows[1].cells[0].simulated_mse, *table.rows[2].cells[0].simulated_mse);
}

TEST(Sweep, FlagsUnstableAndDiverged) {
    Scenario s = small_scenario();
    s.roster = {s.roster[2]};
    const std::vector<double> grid{2.5};
    const auto table = sweep_step_size(s, grid, true);
    const auto& cell = table.rows[0].cells[0];
    EXPECT_TRUE(cell.unstable);
    EXPECT_FALSE(cell.analytical_mse.has_value());
    EXPECT_TRUE(cell.diverged);
}

TEST(Sweep, RejectsBadInput) {
    Scenario s = small_scenario();
    const std::vector<double> empty;
    EXPECT_THROW(sweep_step_size(s, empty, true), InvalidArgument);
    const std::vector<double> neg{-0.1};
    EXPECT_THROW(sweep_step_size(s, neg, true), InvalidArgument);
    s.input_mode = InputMode::Ar1;
    const std::vector<double> ok{0.01};
    EXPECT_THROW(sweep_step_size(s, ok, true), InvalidArgument);
}
