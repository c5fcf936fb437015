#include "cli.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "altlms/mse_analysis.hpp"
#include "altlms/shrinkage.hpp"

namespace altlms::cli {

namespace {

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string format_fixed(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

double parse_double(const std::string& value) {
    double v = 0.0;
    const auto res = std::from_chars(value.data(), value.data() + value.size(), v);
    if (res.ec != std::errc{} || res.ptr != value.data() + value.size()) {
        throw InvalidArgument("expected a number, got '" + value + "'");
    }
    return v;
}

std::uint64_t parse_u64(const std::string& value) {
    std::uint64_t v = 0;
    const auto res = std::from_chars(value.data(), value.data() + value.size(), v);
    if (res.ec != std::errc{} || res.ptr != value.data() + value.size()) {
        throw InvalidArgument("expected a non-negative integer, got '" + value + "'");
    }
    return v;
}

std::size_t parse_size(const std::string& value) {
    return static_cast<std::size_t>(parse_u64(value));
}

std::optional<std::size_t> parse_optional_size(const std::string& value) {
    if (value == "none") return std::nullopt;
    return parse_size(value);
}

bool parse_bool(const std::string& value) {
    if (value == "true") return true;
    if (value == "false") return false;
    throw InvalidArgument("expected true or false, got '" + value + "'");
}

InputMode parse_input_mode(const std::string& v) {
    if (v == "white") return InputMode::White;
    if (v == "ar1") return InputMode::Ar1;
    throw InvalidArgument("expected white or ar1, got '" + v + "'");
}

std::string to_string(InputMode m) {
    return m == InputMode::White ? "white" : "ar1";
}

RegressorStyle parse_regressor_style(const std::string& v) {
    if (v == "tapped_delay_line") return RegressorStyle::TappedDelayLine;
    if (v == "iid_vector") return RegressorStyle::IidVector;
    throw InvalidArgument("expected tapped_delay_line or iid_vector, got '" + v + "'");
}

std::string to_string(RegressorStyle s) {
    return s == RegressorStyle::TappedDelayLine ? "tapped_delay_line" : "iid_vector";
}

CoeffMode parse_coeff_mode(const std::string& v) {
    if (v == "unit") return CoeffMode::UnitTaps;
    if (v == "complex_gaussian") return CoeffMode::ComplexGaussianTaps;
    throw InvalidArgument("expected unit or complex_gaussian, got '" + v + "'");
}

std::string to_string(CoeffMode c) {
    return c == CoeffMode::UnitTaps ? "unit" : "complex_gaussian";
}

const std::vector<std::string>& global_keys() {
    static const std::vector<std::string> keys = {
        "preset",   "m",         "k_initial",      "k_after_switch", "switch_iteration",
        "iterations", "trials",  "snr_db",         "sigma_x2",       "input_mode",
        "ar_coefficient", "regressor_style", "coeff_mode", "base_seed",
    };
    return keys;
}

void apply_global(Scenario& s, const std::string& key, const std::string& value) {
    if (key == "m") s.m = parse_size(value);
    else if (key == "k_initial") s.k_initial = parse_size(value);
    else if (key == "k_after_switch") s.k_after_switch = parse_optional_size(value);
    else if (key == "switch_iteration") s.switch_iteration = parse_optional_size(value);
    else if (key == "iterations") s.iterations = parse_size(value);
    else if (key == "trials") s.trials = parse_size(value);
    else if (key == "snr_db") s.snr_db = parse_double(value);
    else if (key == "sigma_x2") s.sigma_x2 = parse_double(value);
    else if (key == "input_mode") s.input_mode = parse_input_mode(value);
    else if (key == "ar_coefficient") s.ar_coefficient = parse_double(value);
    else if (key == "regressor_style") s.regressor_style = parse_regressor_style(value);
    else if (key == "coeff_mode") s.coeff_mode = parse_coeff_mode(value);
    else if (key == "base_seed") s.base_seed = parse_u64(value);
    else throw InvalidArgument("unknown key");
}

bool apply_algorithm(AlgorithmEntry& e, const std::string& key, const std::string& value) {
    if (key == "label") {
        if (value.empty()) throw InvalidArgument("label must not be empty");
        e.label = value;
    } else if (key == "kind") e.kind = algorithm_from_string(value);
    else if (key == "penalty") e.spec.kind = penalty_from_string(value);
    else if (key == "epsilon") e.spec.epsilon = parse_double(value);
    else if (key == "beta") e.spec.beta = parse_double(value);
    else if (key == "exact_logsum_gradient") e.spec.exact_logsum_gradient = parse_bool(value);
    else if (key == "mu") e.mu = parse_double(value);
    else if (key == "eta") e.eta = parse_double(value);
    else if (key == "tau") e.tau = parse_double(value);
    else if (key == "lambda") e.lambda = parse_double(value);
    else if (key == "update_order") e.order = update_order_from_string(value);
    else return false;
    return true;
}

// Locates the line responsible for a validation message.
std::pair<std::size_t, std::string> blame(const std::string& message, const std::map<std::string, std::size_t>& key_lines,
                                          const std::vector<std::pair<std::string, std::size_t>>& sections) {
    std::vector<std::string> keys;
    for (const auto& [k, line] : key_lines) keys.push_back(k);
    std::sort(keys.begin(), keys.end(), [](const auto& a, const auto& b) { return a.size() > b.size(); });
    auto is_word = [&](std::size_t pos, std::size_t len) {
        auto ident = [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; };
        const bool left = pos == 0 || !ident(message[pos - 1]);
        const bool right = pos + len >= message.size() || !ident(message[pos + len]);
        return left && right;
    };
    for (const auto& k : keys) {
        for (auto pos = message.find(k); pos != std::string::npos; pos = message.find(k, pos + 1)) {
            if (is_word(pos, k.size())) return {key_lines.at(k), k};
        }
    }
    for (const auto& [label, line] : sections) {
        if (message.find("'" + label + "'") != std::string::npos) return {line, "algorithm"};
    }
    if (!sections.empty() && message.find("ShrinkageSpec") != std::string::npos) return {sections.front().second, "algorithm"};
    return {0, ""};
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open '" + path.string() + "' for writing");
    f << contents;
    f.close();
    if (!f) throw IoError("failed writing '" + path.string() + "'");
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

}  // namespace

Scenario parse_config(std::string_view text) {
    Scenario s;
    std::map<std::string, std::size_t> key_lines;
    std::vector<std::pair<std::string, std::size_t>> sections;  // label, header line
    std::set<std::string> section_keys;
    bool in_section = false;
    bool roster_replaced = false;
    bool seen_key = false;

    std::istringstream in{std::string(text)};
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto hash = raw.find('#');
        const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line != "[algorithm]") throw ParseError(line_no, "", "unknown section '" + line + "'");
            if (!roster_replaced) {
                s.roster.clear();
                roster_replaced = true;
            }
            s.roster.emplace_back();
            sections.emplace_back("", line_no);
            section_keys.clear();
            in_section = true;
            seen_key = true;
            continue;
        }

        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ParseError(line_no, "", "malformed line, expected 'key = value'");
        const std::string key = trim(std::string_view(line).substr(0, eq));
        const std::string value = trim(std::string_view(line).substr(eq + 1));
        if (key.empty()) throw ParseError(line_no, "", "malformed line, missing key");

        try {
            if (in_section) {
                if (!section_keys.insert(key).second) throw ParseError(line_no, key, "duplicate key");
                if (!apply_algorithm(s.roster.back(), key, value)) throw ParseError(line_no, key, "unknown key");
                if (key == "label") sections.back().first = value;
                continue;
            }
            if (std::find(global_keys().begin(), global_keys().end(), key) == global_keys().end()) {
                throw ParseError(line_no, key, "unknown key");
            }
            if (key_lines.contains(key)) throw ParseError(line_no, key, "duplicate key");
            if (key == "preset") {
                if (seen_key) throw ParseError(line_no, key, "preset must come before any other key");
                auto preset = preset_by_name(value);
                if (!preset) throw ParseError(line_no, key, "unknown preset '" + value + "'");
                s = *preset;
            } else {
                apply_global(s, key, value);
            }
            key_lines[key] = line_no;
            seen_key = true;
        } catch (const InvalidArgument& e) {
            throw ParseError(line_no, key, e.what());
        }
    }

    for (const auto& [label, line] : sections) {
        if (label.empty()) throw ParseError(line, "label", "algorithm section without a label");
    }
    try {
        s.validate();
    } catch (const InvalidArgument& e) {
        const auto [line, key] = blame(e.what(), key_lines, sections);
        throw ParseError(line, key, e.what());
    }
    return s;
}

std::string format_config(const Scenario& s) {
    std::ostringstream out;
    out << "m = " << s.m << '\n';
    out << "k_initial = " << s.k_initial << '\n';
    if (s.k_after_switch) out << "k_after_switch = " << *s.k_after_switch << '\n';
    if (s.switch_iteration) out << "switch_iteration = " << *s.switch_iteration << '\n';
    out << "iterations = " << s.iterations << '\n';
    out << "trials = " << s.trials << '\n';
    out << "snr_db = " << format_double(s.snr_db) << '\n';
    out << "sigma_x2 = " << format_double(s.sigma_x2) << '\n';
    out << "input_mode = " << to_string(s.input_mode) << '\n';
    out << "ar_coefficient = " << format_double(s.ar_coefficient) << '\n';
    out << "regressor_style = " << to_string(s.regressor_style) << '\n';
    out << "coeff_mode = " << to_string(s.coeff_mode) << '\n';
    out << "base_seed = " << s.base_seed << '\n';
    for (const auto& e : s.roster) {
        out << "\n[algorithm]\n";
        out << "label = " << e.label << '\n';
        out << "kind = " << to_string(e.kind) << '\n';
        out << "penalty = " << to_string(e.spec.kind) << '\n';
        out << "epsilon = " << format_double(e.spec.epsilon) << '\n';
        out << "beta = " << format_double(e.spec.beta) << '\n';
        out << "exact_logsum_gradient = " << (e.spec.exact_logsum_gradient ? "true" : "false") << '\n';
        out << "mu = " << format_double(e.mu) << '\n';
        out << "eta = " << format_double(e.eta) << '\n';
        out << "tau = " << format_double(e.tau) << '\n';
        out << "lambda = " << format_double(e.lambda) << '\n';
        out << "update_order = " << to_string(e.order) << '\n';
    }
    return out.str();
}

Scenario load_scenario(const std::string& source) {
    if (auto preset = preset_by_name(source)) return *preset;
    std::ifstream f(source, std::ios::binary);
    if (!f) throw IoError("cannot read config '" + source + "'");
    std::ostringstream buf;
    buf << f.rdbuf();
    return parse_config(buf.str());
}

std::vector<double> parse_grid(const std::string& spec) {
    const auto a = spec.find(':');
    const auto b = a == std::string::npos ? a : spec.find(':', a + 1);
    if (a == std::string::npos || b == std::string::npos) {
        throw InvalidArgument("grid must look like start:stop:count, got '" + spec + "'");
    }
    const double start = parse_double(spec.substr(0, a));
    const double stop = parse_double(spec.substr(a + 1, b - a - 1));
    const std::size_t count = parse_size(spec.substr(b + 1));
    if (count == 0) throw InvalidArgument("grid count must be >= 1");
    if (count == 1 && start != stop) throw InvalidArgument("grid of one point needs start == stop");
    std::vector<double> grid(count);
    for (std::size_t i = 0; i < count; ++i) {
        grid[i] = count == 1 ? start : start + (stop - start) * static_cast<double>(i) / static_cast<double>(count - 1);
    }
    return grid;
}

std::string curves_csv(const std::vector<LearningCurve>& curves) {
    if (curves.empty()) throw InvalidArgument("curves_csv: no curves");
    std::size_t rows = 0;
    for (const auto& c : curves) rows = std::max(rows, c.mse_db_per_iteration.size());

    std::string out = "iteration";
    for (const auto& c : curves) out += "," + csv_field(c.label);
    out += '\n';
    for (std::size_t i = 0; i < rows; ++i) {
        out += std::to_string(i);
        for (const auto& c : curves) {
            out += ',';
            out += c.all_diverged() ? std::string("diverged") : format_fixed(c.mse_db_per_iteration[i]);
        }
        out += '\n';
    }
    return out;
}

std::string sweep_csv(const SweepTable& table) {
    if (table.rows.empty()) throw InvalidArgument("sweep_csv: no rows");
    std::string out = "step_size";
    for (const auto& l : table.labels) out += "," + csv_field(l + "_simulated_mse_db");
    for (const auto& l : table.labels) out += "," + csv_field(l + "_analytical_mse_db");
    out += ",stability_flag\n";

    for (const auto& row : table.rows) {
        out += format_double(row.step);
        bool any_diverged = false;
        bool any_unstable = false;
        for (const auto& c : row.cells) {
            out += ',';
            out += c.simulated_mse ? format_fixed(to_db(*c.simulated_mse)) : std::string("diverged");
            any_diverged = any_diverged || c.diverged;
        }
        for (const auto& c : row.cells) {
            out += ',';
            if (c.analytical_mse) out += format_fixed(to_db(*c.analytical_mse));
            else out += c.unstable ? "unstable" : "n/a";
            any_unstable = any_unstable || c.unstable;
        }
        out += ',';
        if (any_diverged && any_unstable) out += "diverged+unstable";
        else if (any_diverged) out += "diverged";
        else if (any_unstable) out += "unstable";
        else out += "stable";
        out += '\n';
    }
    return out;
}

std::string metadata_text(const RunMetadata& meta) {
    std::string out;
    out += "# altlms run metadata\n";
    out += "# toolkit_version = " + std::string(kVersion) + "\n";
    out += "# command = " + meta.command + "\n";
    out += "# seed = " + std::to_string(meta.scenario.base_seed) + "\n";
    out += "# analytical_reading = M_w^n := K_w^n; lambda_wx^n := sigma_x2*|w_o^n|^2; J_min := sigma_n2; "
           "zero-lambda indices contribute 0\n";
    for (const auto& n : meta.notes) out += "# " + n + "\n";
    out += format_config(meta.scenario);
    return out;
}

std::filesystem::path metadata_path(const std::filesystem::path& out) {
    std::filesystem::path meta = out;
    meta += ".meta";
    return meta;
}

void emit_csv(const std::vector<LearningCurve>& curves, const std::filesystem::path& out, const RunMetadata& meta) {
    RunMetadata with_flags = meta;
    for (const auto& c : curves) {
        with_flags.notes.push_back("diverged_trials[" + c.label + "] = " + std::to_string(c.diverged_trial_count) +
                                   (c.all_diverged() ? " (all trials diverged; curve omitted)" : ""));
    }
    write_file(out, curves_csv(curves));
    write_file(metadata_path(out), metadata_text(with_flags));
}

void emit_csv(const SweepTable& table, const std::filesystem::path& out, const RunMetadata& meta) {
    write_file(out, sweep_csv(table));
    write_file(metadata_path(out), metadata_text(meta));
}

std::string cost_line(const std::vector<std::string>& args) {
    if (args.size() != 2 && args.size() != 3) throw InvalidArgument("usage: cost <alg> [penalty] <m>");
    const AlgorithmKind kind = algorithm_from_string(args[0]);
    ShrinkageSpec spec;
    if (args.size() == 3) spec.kind = penalty_from_string(args[1]);
    if (kind != AlgorithmKind::Lms && spec.kind == PenaltyKind::None) {
        throw InvalidArgument("cost: " + args[0] + " needs a penalty (l1, logsum, l0)");
    }
    if (kind == AlgorithmKind::Lms && spec.kind != PenaltyKind::None) {
        throw InvalidArgument("cost: lms takes no penalty");
    }
    std::size_t m = 0;
    try {
        m = parse_size(args.back());
    } catch (const InvalidArgument&) {
        throw InvalidArgument("cost: m must be a positive integer, got '" + args.back() + "'");
    }
    const OpCount c = algorithm_cost(kind, spec, m);
    return "adds=" + std::to_string(c.adds) + " mults=" + std::to_string(c.mults) + " divs=" + std::to_string(c.divs);
}

namespace {

struct CommonOptions {
    std::string preset;
    std::string config;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> trials;
    std::optional<std::size_t> iterations;
    unsigned threads = 1;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
    auto* preset = cmd->add_option("--preset", o.preset, "Preset scenario (fig2, fig3)");
    auto* config = cmd->add_option("--config", o.config, "Scenario config file");
    preset->excludes(config);
    cmd->add_option("--out", o.out, "Output CSV path")->required();
    cmd->add_option("--seed", o.seed, "Base seed override");
    cmd->add_option("--trials", o.trials, "Trial count override");
    cmd->add_option("--iterations", o.iterations, "Iteration count override");
    cmd->add_option("--threads", o.threads, "Worker threads (results do not depend on it)");
}

Scenario resolve(const CommonOptions& o) {
    if (o.preset.empty() && o.config.empty()) throw InvalidArgument("one of --preset or --config is required");
    Scenario s;
    if (!o.preset.empty()) {
        auto p = preset_by_name(o.preset);
        if (!p) throw InvalidArgument("unknown preset '" + o.preset + "'");
        s = *p;
    } else {
        s = load_scenario(o.config);
    }
    if (o.seed) s.base_seed = *o.seed;
    if (o.trials) s.trials = *o.trials;
    if (o.iterations) s.iterations = *o.iterations;
    s.validate();
    return s;
}

int cmd_simulate(const CommonOptions& o, std::ostream& out) {
    const Scenario s = resolve(o);
    const auto curves = run_experiment(s, {o.threads});
    emit_csv(curves, o.out, {"simulate", s, {}});
    out << "wrote " << o.out << " (" << curves.size() << " curves, " << s.iterations << " iterations)\n";
    return kOk;
}

int cmd_sweep(const CommonOptions& o, const std::string& grid_spec, bool mu_only, std::ostream& out) {
    const Scenario s = resolve(o);
    const auto grid = parse_grid(grid_spec);
    const auto table = sweep_step_size(s, grid, !mu_only, {o.threads});
    emit_csv(table, o.out, {"sweep", s, {"grid = " + grid_spec, std::string("mu_equals_eta = ") + (mu_only ? "false" : "true")}});
    out << "wrote " << o.out << " (" << table.rows.size() << " grid points)\n";
    return kOk;
}

int cmd_analyze(const CommonOptions& o, std::ostream& out) {
    const Scenario s = resolve(o);
    if (s.input_mode != InputMode::White) throw InvalidArgument("analyze: the MSE model assumes white input");

    std::vector<std::size_t> entries;
    for (std::size_t a = 0; a < s.roster.size(); ++a) {
        if (s.roster[a].kind == AlgorithmKind::SaAltLms) entries.push_back(a);
    }
    if (entries.empty()) throw InvalidArgument("analyze: roster has no sa-alt-lms entries");

    std::vector<LearningCurve> curves;
    std::vector<std::string> notes;
    for (std::size_t a : entries) {
        const AlgorithmEntry& e = s.roster[a];
        std::vector<double> mse(s.iterations, 0.0);
        double steady = 0.0;
        for (std::size_t t = 0; t < s.trials; ++t) {
            const auto in = make_analysis_input(trial_system(s, t), s.sigma_x2, s.sigma_n2(), e.mu, e.eta, e.tau,
                                                e.lambda, e.spec);
            steady += steady_state(in).mse;
            const auto seq = transient_k(in, s.iterations);
            for (std::size_t i = 0; i < s.iterations; ++i) mse[i] += seq[i].mse;
        }
        LearningCurve c;
        c.label = e.label;
        for (double& v : mse) v /= static_cast<double>(s.trials);
        c.mse_db_per_iteration.reserve(mse.size());
        for (double v : mse) c.mse_db_per_iteration.push_back(to_db(v));
        c.mse_per_iteration = std::move(mse);
        notes.push_back("steady_state_mse_db[" + e.label + "] = " + format_fixed(to_db(steady / static_cast<double>(s.trials))));
        curves.push_back(std::move(c));
    }
    write_file(o.out, curves_csv(curves));
    write_file(metadata_path(o.out), metadata_text({"analyze", s, notes}));
    out << "wrote " << o.out << " (" << curves.size() << " analytical curves)\n";
    return kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Sparsity-aware alternating-optimization LMS toolkit"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);

    CommonOptions sim_opts;
    auto* simulate = app.add_subcommand("simulate", "Run Monte-Carlo learning curves");
    add_common(simulate, sim_opts);

    CommonOptions sweep_opts;
    std::string grid;
    bool mu_only = false;
    auto* sweep = app.add_subcommand("sweep", "Steady-state MSE versus step size, simulated and analytical");
    add_common(sweep, sweep_opts);
    sweep->add_option("--grid", grid, "start:stop:count")->required();
    sweep->add_flag("--mu-only", mu_only, "Sweep mu only and keep each entry's eta");

    CommonOptions analyze_opts;
    auto* analyze = app.add_subcommand("analyze", "Analytical transient and steady-state MSE");
    add_common(analyze, analyze_opts);

    std::vector<std::string> cost_args;
    auto* cost = app.add_subcommand("cost", "Per-iteration arithmetic cost: cost <alg> [penalty] <m>");
    cost->add_option("args", cost_args, "<alg> [penalty] <m>")->required()->expected(2, 3);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsageError;
    }

    try {
        if (simulate->parsed()) return cmd_simulate(sim_opts, out);
        if (sweep->parsed()) return cmd_sweep(sweep_opts, grid, mu_only, out);
        if (analyze->parsed()) return cmd_analyze(analyze_opts, out);
        if (cost->parsed()) {
            out << cost_line(cost_args) << '\n';
            return kOk;
        }
    } catch (const ParseError& e) {
        err << "config error: " << e.what() << '\n';
        return kUsageError;
    } catch (const UnstableConfiguration& e) {
        err << "unstable configuration: " << e.what() << '\n';
        return kUnstable;
    } catch (const IoError& e) {
        err << "i/o error: " << e.what() << '\n';
        return kIoError;
    } catch (const InvalidArgument& e) {
        err << "error: " << e.what() << '\n';
        return kUsageError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kFailure;
    }
    return kUsageError;
}

}  // namespace altlms::cli
